//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_FINGERPRINT_HPP
#define SYNTHRANK_FINGERPRINT_HPP

#include <cstdint>
#include <map>
#include <string>

#include "synthrank/smiles.hpp"

namespace synthrank {

enum class FpVariant : std::uint8_t {
  kBoolean,
  kCounts,
  kBooleanChiral,
  kCountsChiral,
};

bool fp_is_counts(FpVariant v);
bool fp_is_chiral(FpVariant v);
const char* fp_variant_name(FpVariant v);
FpVariant fp_variant_from_name(const std::string& name);

// Circular (Morgan-style) fingerprint. Positions come from a fixed 64-bit
// mix of the environment invariants reduced mod n_bits, so values are
// stable across runs and platforms but not bit-compatible with any other
// toolkit.
struct Fingerprint {
  int n_bits = 2048;
  int radius = 4;
  FpVariant variant = FpVariant::kCounts;
  std::map<std::uint32_t, std::uint32_t> data;  // position -> count (>= 1)

  bool empty() const { return data.empty(); }
};

Fingerprint morgan_fingerprint(const Molecule& mol, int radius = 4,
                               int n_bits = 2048,
                               FpVariant variant = FpVariant::kCounts);

// Boolean fingerprints: |intersection| / |union|. Counts fingerprints:
// MinMax, sum(min) / sum(max). Both empty -> 1. Throws ValueError on
// mismatched n_bits/variant.
double tanimoto_similarity(const Fingerprint& a, const Fingerprint& b);
double tanimoto_distance(const Fingerprint& a, const Fingerprint& b);

}  // namespace synthrank

#endif
