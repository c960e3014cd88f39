//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/fingerprint.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "synthrank/errors.hpp"
#include "synthrank/rng.hpp"

namespace synthrank {

bool fp_is_counts(FpVariant v) {
  return v == FpVariant::kCounts || v == FpVariant::kCountsChiral;
}

bool fp_is_chiral(FpVariant v) {
  return v == FpVariant::kBooleanChiral || v == FpVariant::kCountsChiral;
}

const char* fp_variant_name(FpVariant v) {
  switch (v) {
    case FpVariant::kBoolean: return "boolean";
    case FpVariant::kCounts: return "counts";
    case FpVariant::kBooleanChiral: return "boolean_chiral";
    case FpVariant::kCountsChiral: return "counts_chiral";
  }
  return "counts";
}

FpVariant fp_variant_from_name(const std::string& name) {
  if (name == "boolean") return FpVariant::kBoolean;
  if (name == "counts") return FpVariant::kCounts;
  if (name == "boolean_chiral") return FpVariant::kBooleanChiral;
  if (name == "counts_chiral") return FpVariant::kCountsChiral;
  throw ValueError("unknown fingerprint variant: " + name);
}

namespace {

std::uint64_t hash_sequence(std::uint64_t seed,
                            const std::vector<std::uint64_t>& xs) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t x : xs) h = mix64(h, x);
  return h;
}

std::uint64_t initial_invariant(const Molecule& mol, int idx, bool chiral) {
  const Atom& a = mol.atoms[idx];
  std::vector<std::uint64_t> parts{
      static_cast<std::uint64_t>(a.element),
      static_cast<std::uint64_t>(a.formal_charge + 8),
      static_cast<std::uint64_t>(a.degree),
      static_cast<std::uint64_t>(a.total_h()),
      static_cast<std::uint64_t>(a.aromatic ? 1 : 0),
      static_cast<std::uint64_t>(a.in_ring ? 1 : 0),
  };
  if (chiral) parts.push_back(static_cast<std::uint64_t>(a.parity));
  return hash_sequence(0x5eedf00d, parts);
}

}  // namespace

Fingerprint morgan_fingerprint(const Molecule& mol, int radius, int n_bits,
                               FpVariant variant) {
  if (n_bits <= 0) throw ValueError("n_bits must be positive");
  if (radius < 0) throw ValueError("radius must be non-negative");

  Fingerprint fp;
  fp.n_bits = n_bits;
  fp.radius = radius;
  fp.variant = variant;

  int n = mol.num_atoms();
  bool chiral = fp_is_chiral(variant);
  bool counts = fp_is_counts(variant);

  auto add = [&](std::uint64_t code) {
    auto pos = static_cast<std::uint32_t>(code % static_cast<std::uint64_t>(n_bits));
    auto it = fp.data.find(pos);
    if (it == fp.data.end()) {
      fp.data[pos] = 1;
    } else if (counts) {
      ++it->second;
    }
  };

  std::vector<std::uint64_t> code(n);
  for (int i = 0; i < n; ++i) {
    code[i] = initial_invariant(mol, i, chiral);
    add(code[i]);
  }

  // Bond set within the current radius per atom; environments that stop
  // growing contribute nothing new, and identical (code, bond set) pairs
  // within one radius step are emitted once.
  std::vector<std::vector<int>> bond_set(n);
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next_code(n);
    std::vector<std::vector<int>> next_set(n);
    std::set<std::pair<std::uint64_t, std::vector<int>>> seen_this_round;
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> nb;
      std::set<int> bonds(bond_set[i].begin(), bond_set[i].end());
      for (int bi : mol.adjacency[i]) {
        const Bond& b = mol.bonds[bi];
        nb.emplace_back(static_cast<std::uint64_t>(b.order), code[b.other(i)]);
        bonds.insert(bi);
        for (int nbbi : bond_set[b.other(i)]) bonds.insert(nbbi);
      }
      std::sort(nb.begin(), nb.end());
      std::vector<std::uint64_t> parts{code[i]};
      for (auto& [o, c] : nb) {
        parts.push_back(o);
        parts.push_back(c);
      }
      next_code[i] = hash_sequence(0xc0ffee ^ static_cast<std::uint64_t>(r), parts);
      next_set[i].assign(bonds.begin(), bonds.end());
    }
    for (int i = 0; i < n; ++i) {
      if (next_set[i] == bond_set[i]) continue;  // environment stopped growing
      auto key = std::make_pair(next_code[i], next_set[i]);
      if (seen_this_round.insert(key).second) {
        add(next_code[i]);
      }
    }
    code = std::move(next_code);
    bond_set = std::move(next_set);
  }
  return fp;
}

double tanimoto_similarity(const Fingerprint& a, const Fingerprint& b) {
  if (a.n_bits != b.n_bits) {
    throw ValueError("fingerprint n_bits mismatch");
  }
  if (a.variant != b.variant) {
    throw ValueError("fingerprint variant mismatch");
  }
  if (a.data.empty() && b.data.empty()) return 1.0;

  double min_sum = 0.0, max_sum = 0.0;
  auto ia = a.data.begin();
  auto ib = b.data.begin();
  while (ia != a.data.end() || ib != b.data.end()) {
    if (ib == b.data.end() || (ia != a.data.end() && ia->first < ib->first)) {
      max_sum += ia->second;
      ++ia;
    } else if (ia == a.data.end() || ib->first < ia->first) {
      max_sum += ib->second;
      ++ib;
    } else {
      min_sum += std::min(ia->second, ib->second);
      max_sum += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return max_sum == 0.0 ? 1.0 : min_sum / max_sum;
}

double tanimoto_distance(const Fingerprint& a, const Fingerprint& b) {
  return 1.0 - tanimoto_similarity(a, b);
}

}  // namespace synthrank
