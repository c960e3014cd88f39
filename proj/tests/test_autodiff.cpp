//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "synthrank/autodiff.hpp"

using namespace synthrank;

namespace {

using BuildFn =
    std::function<Tape<double>::Id(Tape<double>&, const std::vector<int>&)>;

// Central finite differences against the reverse sweep, h = 1e-4.
double max_rel_error(std::vector<Tensor<double>> leaves, const BuildFn& build) {
  Tape<double> tape;
  std::vector<int> ids;
  for (auto& t : leaves) ids.push_back(tape.leaf(t, true));
  int loss = build(tape, ids);
  tape.backward(loss);

  const double h = 1e-4;
  double worst = 0.0;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    for (std::size_t i = 0; i < leaves[k].data.size(); ++i) {
      auto eval = [&](double delta) {
        std::vector<Tensor<double>> mod = leaves;
        mod[k].data[i] += delta;
        Tape<double> t2;
        std::vector<int> ids2;
        for (auto& t : mod) ids2.push_back(t2.leaf(t, true));
        return t2.value(build(t2, ids2)).data[0];
      };
      double numeric = (eval(h) - eval(-h)) / (2 * h);
      double analytic = tape.grad(ids[k]).data[i];
      double err = std::abs(analytic - numeric) /
                   std::max(1.0, std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

Tensor<double> filled(std::int64_t r, std::int64_t c, RngStream& rng,
                      double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(r, c);
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("d/dx x*x at 3 is 6") {
  Tape<double> tape;
  int x = tape.leaf(Tensor<double>::scalar(3.0), true);
  int y = tape.mul(x, x);
  tape.backward(y);
  CHECK(tape.grad(x).data[0] == doctest::Approx(6.0));
}

TEST_CASE("sigmoid gradient at 0 is 0.25") {
  Tape<double> tape;
  int x = tape.leaf(Tensor<double>::scalar(0.0), true);
  int y = tape.sigmoid(x);
  tape.backward(y);
  CHECK(tape.grad(x).data[0] == doctest::Approx(0.25));
}

TEST_CASE("segment ops basics") {
  Tape<double> tape;
  Tensor<double> v(2, 1);
  v.data = {0.0, 0.0};
  int x = tape.leaf(v);
  int s = tape.segment_softmax(x, {0, 0}, 1);
  CHECK(tape.value(s).data[0] == doctest::Approx(0.5));
  CHECK(tape.value(s).data[1] == doctest::Approx(0.5));

  Tensor<double> m(3, 1);
  m.data = {1.0, 3.0, 2.0};
  int xm = tape.leaf(m);
  int mx = tape.segment_max(xm, {0, 0, 1}, 2);
  CHECK(tape.value(mx).data[0] == doctest::Approx(3.0));
  CHECK(tape.value(mx).data[1] == doctest::Approx(2.0));

  int sm = tape.segment_sum(xm, {0, 0, 1}, 2);
  CHECK(tape.value(sm).data[0] == doctest::Approx(4.0));
  CHECK(tape.value(sm).data[1] == doctest::Approx(2.0));
}

TEST_CASE("segment_softmax sums to one within each segment") {
  RngStream rng(40);
  for (int t = 0; t < 50; ++t) {
    int n = 1 + static_cast<int>(rng.next_below(20));
    int n_seg = 1 + static_cast<int>(rng.next_below(5));
    std::vector<int> seg(n);
    for (int& s : seg) s = static_cast<int>(rng.next_below(n_seg));
    Tape<double> tape;
    int x = tape.leaf(filled(n, 1, rng, -5, 5));
    int s = tape.segment_softmax(x, seg, n_seg);
    std::vector<double> sums(n_seg, 0.0);
    for (int i = 0; i < n; ++i) sums[seg[i]] += tape.value(s).data[i];
    std::vector<bool> present(n_seg, false);
    for (int i = 0; i < n; ++i) present[seg[i]] = true;
    for (int k = 0; k < n_seg; ++k) {
      if (present[k]) CHECK(sums[k] == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("dropout with rate 0 is the identity") {
  RngStream rng(1);
  Tape<double> tape;
  Tensor<double> v = filled(4, 3, rng);
  int x = tape.leaf(v);
  RngStream mask(7);
  int y = tape.dropout(x, 0.0, mask);
  CHECK(tape.value(y).data == v.data);
  CHECK_THROWS_AS(tape.dropout(x, 1.0, mask), ValueError);
}

TEST_CASE("gradients match finite differences per primitive") {
  RngStream rng(77);

  SUBCASE("matmul chain") {
    auto A = filled(3, 4, rng);
    auto B = filled(4, 2, rng);
    double err = max_rel_error({A, B}, [](Tape<double>& t, const std::vector<int>& ids) {
      return t.reduce_sum(t.square(t.matmul(ids[0], ids[1])));
    });
    CHECK(err < 1e-4);
  }

  SUBCASE("bias add + relu family") {
    auto X = filled(5, 3, rng);
    auto b = filled(1, 3, rng);
    for (int variant = 0; variant < 4; ++variant) {
      double err = max_rel_error({X, b}, [variant](Tape<double>& t,
                                                   const std::vector<int>& ids) {
        int h = t.add(ids[0], ids[1]);
        switch (variant) {
          case 0: h = t.relu(h); break;
          case 1: h = t.leaky_relu(h, 0.2); break;
          case 2: h = t.elu(h); break;
          case 3: h = t.sigmoid(h); break;
        }
        return t.reduce_sum(h);
      });
      CHECK(err < 1e-4);
    }
  }

  SUBCASE("softplus, exp, log, square") {
    auto X = filled(4, 2, rng, 0.5, 2.0);
    double err = max_rel_error({X}, [](Tape<double>& t, const std::vector<int>& ids) {
      int a = t.softplus(ids[0]);
      int b = t.log(t.add(a, t.scale(t.exp(ids[0]), 0.1)));
      return t.reduce_mean(t.square(b));
    });
    CHECK(err < 1e-4);
  }

  SUBCASE("prelu") {
    auto X = filled(4, 3, rng);
    auto s = Tensor<double>::scalar(0.25);
    double err = max_rel_error({X, s}, [](Tape<double>& t, const std::vector<int>& ids) {
      return t.reduce_sum(t.prelu(ids[0], ids[1]));
    });
    CHECK(err < 1e-4);
  }

  SUBCASE("segment softmax attention pattern") {
    auto logits = filled(6, 1, rng, -2, 2);
    auto vals = filled(6, 3, rng);
    std::vector<int> seg{0, 0, 1, 1, 1, 2};
    double err = max_rel_error({logits, vals}, [seg](Tape<double>& t,
                                                     const std::vector<int>& ids) {
      int alpha = t.segment_softmax(ids[0], seg, 3);
      int weighted = t.scale_rows(ids[1], alpha);
      int agg = t.segment_sum(weighted, seg, 3);
      return t.reduce_sum(t.square(agg));
    });
    CHECK(err < 1e-4);
  }

  SUBCASE("segment max and gather") {
    auto X = filled(5, 2, rng);
    std::vector<int> seg{0, 0, 1, 1, 1};
    double err = max_rel_error({X}, [seg](Tape<double>& t, const std::vector<int>& ids) {
      int g = t.row_gather(ids[0], {4, 0, 2, 2});
      int mx = t.segment_max(t.concat_rows(ids[0], g), {0, 0, 1, 1, 1, 2, 2, 3, 3}, 4);
      return t.reduce_sum(t.square(mx));
    });
    CHECK(err < 1e-4);
  }

  SUBCASE("concat and slice") {
    auto A = filled(3, 2, rng);
    auto B = filled(3, 4, rng);
    double err = max_rel_error({A, B}, [](Tape<double>& t, const std::vector<int>& ids) {
      int c = t.concat_cols(ids[0], ids[1]);
      int s = t.col_slice(c, 1, 5);
      return t.reduce_mean(t.square(s));
    });
    CHECK(err < 1e-4);
  }
}

TEST_CASE("random 20-parameter composite graph passes the fd oracle") {
  RngStream rng(2025);
  std::vector<Tensor<double>> leaves;
  leaves.push_back(filled(2, 5, rng));   // 10 params
  leaves.push_back(filled(5, 1, rng));   // 5
  leaves.push_back(filled(1, 4, rng));   // 4
  leaves.push_back(Tensor<double>::scalar(rng.uniform(-1, 1)));  // 1
  double err = max_rel_error(leaves, [](Tape<double>& t, const std::vector<int>& ids) {
    int h = t.matmul(ids[0], ids[1]);          // 2x1
    int h2 = t.sigmoid(h);
    int w = t.matmul(t.concat_cols(h2, h2), t.concat_rows(ids[2], ids[2]));
    int act = t.elu(t.prelu(w, ids[3]));
    return t.reduce_mean(t.square(t.softplus(act)));
  });
  CHECK(err < 1e-4);
}

TEST_CASE("backward requires a scalar loss") {
  Tape<double> tape;
  int x = tape.leaf(Tensor<double>(2, 2), true);
  CHECK_THROWS_AS(tape.backward(x), ValueError);
}

TEST_CASE("adam basics") {
  std::vector<Tensor<float>> params{Tensor<float>::scalar(1.5f)};
  AdamState<float> state(1e-3);
  state.init(params);

  SUBCASE("zero gradient leaves parameters unchanged") {
    std::vector<Tensor<float>> grads{Tensor<float>::scalar(0.0f)};
    adam_step(params, grads, state);
    CHECK(params[0].data[0] == 1.5f);
    CHECK(state.step == 1);
  }

  SUBCASE("first step moves by about lr in -sign(g)") {
    std::vector<Tensor<float>> grads{Tensor<float>::scalar(0.37f)};
    adam_step(params, grads, state);
    CHECK(params[0].data[0] == doctest::Approx(1.5f - 1e-3).epsilon(1e-4));

    std::vector<Tensor<float>> params2{Tensor<float>::scalar(1.5f)};
    AdamState<float> s2(1e-3);
    s2.init(params2);
    std::vector<Tensor<float>> g2{Tensor<float>::scalar(-120.0f)};
    adam_step(params2, g2, s2);
    CHECK(params2[0].data[0] == doctest::Approx(1.5f + 1e-3).epsilon(1e-4));
  }

  SUBCASE("bit-identical given identical state and gradients") {
    std::vector<Tensor<float>> pa{Tensor<float>::scalar(0.25f)};
    std::vector<Tensor<float>> pb{Tensor<float>::scalar(0.25f)};
    AdamState<float> sa(3e-4), sb(3e-4);
    sa.init(pa);
    sb.init(pb);
    std::vector<Tensor<float>> g{Tensor<float>::scalar(0.125f)};
    for (int i = 0; i < 5; ++i) {
      adam_step(pa, g, sa);
      adam_step(pb, g, sb);
    }
    CHECK(pa[0].data[0] == pb[0].data[0]);
  }

  SUBCASE("shape mismatch is rejected") {
    std::vector<Tensor<float>> grads{Tensor<float>(2, 2)};
    CHECK_THROWS_AS(adam_step(params, grads, state), ValueError);
  }
}

TEST_CASE("training loop is deterministic given the seed") {
  auto run = [](std::uint64_t seed) {
    std::vector<Tensor<float>> params{Tensor<float>(1, 3)};
    RngStream init(seed);
    for (auto& v : params[0].data) v = static_cast<float>(init.uniform(-1, 1));
    AdamState<float> state(1e-2);
    state.init(params);
    std::vector<float> losses;
    for (int step = 0; step < 10; ++step) {
      Tape<float> tape;
      int w = tape.leaf(params[0], true);
      RngStream drop(seed, 100 + step);
      int h = tape.dropout(w, 0.3, drop);
      int loss = tape.reduce_mean(tape.square(h));
      tape.backward(loss);
      losses.push_back(tape.value(loss).data[0]);
      std::vector<Tensor<float>> grads{tape.grad(w)};
      adam_step(params, grads, state);
    }
    return losses;
  };
  CHECK(run(42) == run(42));
  CHECK(run(42) != run(43));
}
