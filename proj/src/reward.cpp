//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/reward.hpp"

#include <algorithm>
#include <cmath>

#include "synthrank/errors.hpp"

namespace synthrank {

namespace {

// 1 / (1 + 10^e) with the exponent clamped to +-300 so no finite input can
// overflow a double (10^308 is the limit).
double inv_one_plus_pow10(double e) {
  e = std::clamp(e, -300.0, 300.0);
  return 1.0 / (1.0 + std::pow(10.0, e));
}

}  // namespace

double sigmoid_reward(double x, const SigmoidTransform& t) {
  if (t.a == t.b) throw ValueError("sigmoid transform needs a != b");
  if (t.k <= 0.0) throw ValueError("sigmoid steepness must be positive");
  double e = 10.0 * t.k * (x - (t.a + t.b) / 2.0) / (t.a - t.b);
  return inv_one_plus_pow10(e);
}

double double_sigmoid_reward(double x, const DoubleSigmoidTransform& t) {
  if (t.c_div == 0.0) throw ValueError("double sigmoid needs c_div != 0");
  // Each term is 10^(c x / d) / (10^(c x / d) + 10^(c t / d)), evaluated as
  // 1 / (1 + 10^(c (t - x) / d)) so only the exponent difference matters.
  double rising = inv_one_plus_pow10(t.c_si * (t.a - x) / t.c_div);
  double falling = inv_one_plus_pow10(t.c_se * (t.b - x) / t.c_div);
  return rising - falling;
}

}  // namespace synthrank
