//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synthrank/fingerprint.hpp"
#include "synthrank/smiles.hpp"
#include "testutil.hpp"

using namespace synthrank;

TEST_CASE("single atom has exactly one nonzero position") {
  Fingerprint fp = morgan_fingerprint(parse_smiles("C"), 4, 2048);
  CHECK(fp.data.size() == 1);
  CHECK(fp.data.begin()->second == 1);
}

TEST_CASE("atom order does not change the fingerprint") {
  for (auto v : {FpVariant::kBoolean, FpVariant::kCounts,
                 FpVariant::kBooleanChiral, FpVariant::kCountsChiral}) {
    Fingerprint a = morgan_fingerprint(parse_smiles("CCO"), 4, 2048, v);
    Fingerprint b = morgan_fingerprint(parse_smiles("OCC"), 4, 2048, v);
    CHECK(a.data == b.data);
  }
}

TEST_CASE("atom order invariance on random molecules") {
  RngStream rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    auto rm = testutil::random_molecule(rng, 8 + static_cast<int>(rng.next_below(5)));
    RngStream o1(trial * 2), o2(trial * 2 + 1);
    Fingerprint a =
        morgan_fingerprint(parse_smiles(testutil::write_smiles(rm, o1)));
    Fingerprint b =
        morgan_fingerprint(parse_smiles(testutil::write_smiles(rm, o2)));
    CHECK(a.data == b.data);
  }
}

TEST_CASE("counts accumulate where boolean caps") {
  Molecule octane = parse_smiles("CCCCCCCC");
  Fingerprint counts = morgan_fingerprint(octane, 4, 2048, FpVariant::kCounts);
  Fingerprint boolean =
      morgan_fingerprint(octane, 4, 2048, FpVariant::kBoolean);
  std::uint32_t max_count = 0;
  for (auto& [pos, c] : counts.data) max_count = std::max(max_count, c);
  CHECK(max_count >= 4);
  for (auto& [pos, c] : boolean.data) CHECK(c == 1);
  // same support
  CHECK(counts.data.size() == boolean.data.size());
}

TEST_CASE("chiral variant separates parities, plain variant does not") {
  Molecule m1 = parse_smiles("C[C@@H](N)O");
  Molecule m2 = parse_smiles("C[C@H](N)O");
  CHECK(morgan_fingerprint(m1, 2, 2048, FpVariant::kCountsChiral).data !=
        morgan_fingerprint(m2, 2, 2048, FpVariant::kCountsChiral).data);
  CHECK(morgan_fingerprint(m1, 2, 2048, FpVariant::kCounts).data ==
        morgan_fingerprint(m2, 2, 2048, FpVariant::kCounts).data);
}

TEST_CASE("tanimoto identities") {
  Fingerprint f = morgan_fingerprint(parse_smiles("CCO"));
  CHECK(tanimoto_similarity(f, f) == doctest::Approx(1.0));
  CHECK(tanimoto_distance(f, f) == doctest::Approx(0.0));

  Fingerprint a, b;
  a.data = {{1, 2}, {2, 1}};
  b.data = {{1, 1}, {3, 1}};
  // min-sum 1, max-sum 4
  CHECK(tanimoto_similarity(a, b) == doctest::Approx(0.25));
  CHECK(tanimoto_distance(a, b) == doctest::Approx(0.75));

  Fingerprint d1, d2;
  d1.data = {{1, 1}};
  d2.data = {{5, 3}};
  CHECK(tanimoto_similarity(d1, d2) == doctest::Approx(0.0));

  Fingerprint e1, e2;
  CHECK(tanimoto_similarity(e1, e2) == doctest::Approx(1.0));
}

TEST_CASE("tanimoto is symmetric") {
  RngStream rng(3);
  for (int t = 0; t < 20; ++t) {
    auto ra = testutil::random_molecule(rng, 6 + static_cast<int>(rng.next_below(6)));
    auto rb = testutil::random_molecule(rng, 6 + static_cast<int>(rng.next_below(6)));
    RngStream oa(t), ob(1000 + t);
    Fingerprint a =
        morgan_fingerprint(parse_smiles(testutil::write_smiles(ra, oa)));
    Fingerprint b =
        morgan_fingerprint(parse_smiles(testutil::write_smiles(rb, ob)));
    CHECK(tanimoto_similarity(a, b) ==
          doctest::Approx(tanimoto_similarity(b, a)).epsilon(1e-15));
    double s = tanimoto_similarity(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("mismatched parameters are rejected") {
  Fingerprint a = morgan_fingerprint(parse_smiles("C"), 4, 2048);
  Fingerprint b = morgan_fingerprint(parse_smiles("C"), 4, 1024);
  CHECK_THROWS_AS(tanimoto_similarity(a, b), ValueError);
  Fingerprint c = morgan_fingerprint(parse_smiles("C"), 4, 2048,
                                     FpVariant::kBoolean);
  CHECK_THROWS_AS(tanimoto_similarity(a, c), ValueError);
}

TEST_CASE("raising radius never removes counts positions at large n_bits") {
  RngStream rng(17);
  for (int t = 0; t < 15; ++t) {
    auto rm = testutil::random_molecule(rng, 6 + static_cast<int>(rng.next_below(7)));
    RngStream o(t);
    Molecule m = parse_smiles(testutil::write_smiles(rm, o));
    Fingerprint prev = morgan_fingerprint(m, 0, 1 << 20);
    for (int r = 1; r <= 4; ++r) {
      Fingerprint cur = morgan_fingerprint(m, r, 1 << 20);
      for (auto& [pos, c] : prev.data) {
        CHECK(cur.data.count(pos) == 1);
        CHECK(cur.data.at(pos) >= c);
      }
      prev = cur;
    }
  }
}

TEST_CASE("determinism across calls") {
  Molecule m = parse_smiles("c1ccccc1CC(N)C(=O)O");
  Fingerprint a = morgan_fingerprint(m);
  Fingerprint b = morgan_fingerprint(m);
  CHECK(a.data == b.data);
}
