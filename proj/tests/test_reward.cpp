//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "synthrank/reward.hpp"
#include "synthrank/errors.hpp"
#include "synthrank/rng.hpp"

using namespace synthrank;

TEST_CASE("reverse sigmoid for docking scores") {
  SigmoidTransform dock{-1.0, -13.0, 0.25};
  CHECK(sigmoid_reward(-7.0, dock) == 0.5);  // midpoint: exponent is 0
  // direct evaluation: exponent 10*0.25*(-13+7)/12 = -1.25
  double expected = 1.0 / (1.0 + std::pow(10.0, -1.25));
  CHECK(sigmoid_reward(-13.0, dock) == doctest::Approx(expected));
  CHECK(sigmoid_reward(-13.0, dock) == doctest::Approx(0.9467).epsilon(1e-3));
  // reverse: small docking score -> reward towards 1
  CHECK(sigmoid_reward(-20.0, dock) > 0.99);
  CHECK(sigmoid_reward(0.0, dock) < 0.1);
}

TEST_CASE("score-transform midpoint and monotonicity") {
  SigmoidTransform fs{-13.08, 10.07, 0.25};
  CHECK(sigmoid_reward((fs.a + fs.b) / 2.0, fs) == 0.5);
  // a < b: increasing in x
  double prev = -1;
  for (double x = -30; x <= 30; x += 0.5) {
    double r = sigmoid_reward(x, fs);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("swapping a and b reflects the sigmoid") {
  RngStream rng(9);
  SigmoidTransform t{10.0, 1.0, 0.25};
  SigmoidTransform r{1.0, 10.0, 0.25};
  for (int i = 0; i < 100; ++i) {
    double x = rng.uniform(-50, 50);
    CHECK(sigmoid_reward(x, t) + sigmoid_reward(x, r) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sigmoid_reward(0.0, SigmoidTransform{1.0, 1.0, 0.25}),
                  ValueError);
}

TEST_CASE("double sigmoid plateau and tails") {
  DoubleSigmoidTransform t;  // defaults a=0, b=500, c=500/500/250
  CHECK(double_sigmoid_reward(250.0, t) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(double_sigmoid_reward(250.0, t) >= 1.0 - 1e-9);
  CHECK(double_sigmoid_reward(0.0, t) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(double_sigmoid_reward(600.0, t) <= 1e-9);
  CHECK(double_sigmoid_reward(-100.0, t) <= 1e-9);
  CHECK_THROWS_AS(
      double_sigmoid_reward(1.0, DoubleSigmoidTransform{0, 1, 1, 1, 0}),
      ValueError);
}

TEST_CASE("double sigmoid is symmetric about the interval midpoint") {
  DoubleSigmoidTransform t;
  RngStream rng(10);
  for (int i = 0; i < 200; ++i) {
    double x = rng.uniform(-200, 700);
    double lhs = double_sigmoid_reward(x, t);
    double rhs = double_sigmoid_reward(t.a + t.b - x, t);
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("no non-finite outputs over a huge sweep") {
  DoubleSigmoidTransform d;
  SigmoidTransform s{-1.0, -13.0, 0.25};
  for (double x : {-1e9, -1e6, -1e3, -1.0, 0.0, 1.0, 1e3, 1e6, 1e9}) {
    CHECK(std::isfinite(sigmoid_reward(x, s)));
    CHECK(std::isfinite(double_sigmoid_reward(x, d)));
    CHECK(double_sigmoid_reward(x, d) >= -1e-12);
    CHECK(double_sigmoid_reward(x, d) <= 1.0 + 1e-12);
  }
}
