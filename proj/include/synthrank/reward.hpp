//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_REWARD_HPP
#define SYNTHRANK_REWARD_HPP

namespace synthrank {

// x' = 1 / (1 + 10^(10k (x - (a+b)/2) / (a - b))). With a > b this rises in
// x; swapping a and b reflects the curve. Exponents are clamped so extreme
// scores saturate to 0/1 instead of overflowing.
struct SigmoidTransform {
  double a = -1.0;
  double b = -13.0;
  double k = 0.25;
};

double sigmoid_reward(double x, const SigmoidTransform& t);

// Rising sigmoid at a minus rising sigmoid at b, both base-10 with
// steepness c/c_div: about 1 inside (a, b) and about 0 outside.
struct DoubleSigmoidTransform {
  double a = 0.0;
  double b = 500.0;
  double c_se = 500.0;
  double c_si = 500.0;
  double c_div = 250.0;
};

double double_sigmoid_reward(double x, const DoubleSigmoidTransform& t);

}  // namespace synthrank

#endif
