//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_DATAPIPE_HPP
#define SYNTHRANK_DATAPIPE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synthrank/smiles.hpp"

namespace synthrank {

// One reactant paired with its product, both canonical isomeric SMILES.
struct ReactionPair {
  std::string reactant;
  std::string product;
};

// Counts per rejection reason, written alongside the filtered corpus.
struct RejectionReport {
  long long total_rows = 0;
  long long kept = 0;
  std::map<std::string, long long> rejected;  // reason -> count

  std::string to_json() const;
};

struct FilterResult {
  std::vector<ReactionPair> pairs;
  RejectionReport report;
};

// Reads a delimited file with reactant/product columns, expands
// multi-reactant rows ('.'-separated) to one pair per reactant,
// canonicalizes, and applies the corpus filters: parse failures, identical
// isomeric pairs, fewer than `min_heavy_atoms` heavy atoms on either side,
// unsupported elements, exact duplicates (first instance kept).
FilterResult load_and_filter(const std::string& path,
                             const std::string& reactant_col = "reactant",
                             const std::string& product_col = "product",
                             int min_heavy_atoms = 4);

// Same filters over in-memory rows; load_and_filter delegates here.
FilterResult filter_reaction_rows(
    const std::vector<std::pair<std::string, std::string>>& rows,
    int min_heavy_atoms = 4);

struct ReactionNetwork {
  // adjacency: node -> successors, deterministic lexicographic order
  std::map<std::string, std::set<std::string>> edges;

  void add_edge(const std::string& from, const std::string& to) {
    edges[from].insert(to);
    edges[to];  // make sure the node exists
  }
};

ReactionNetwork build_network(const std::vector<ReactionPair>& pairs);

struct CycleRemoval {
  ReactionNetwork pruned;
  std::vector<std::pair<std::string, std::string>> removed;  // audit trail
};

// Depth-first search from every unvisited node in lexicographic order; any
// edge into a node on the active DFS stack is a back edge and is removed.
// The result is guaranteed acyclic.
CycleRemoval remove_cycles_dfs(const ReactionNetwork& network);

bool is_acyclic(const ReactionNetwork& network);

// Keeps only pairs whose edge survived cycle removal.
std::vector<ReactionPair> apply_cycle_removal(
    const std::vector<ReactionPair>& pairs, const CycleRemoval& removal);

struct SplitResult {
  std::vector<ReactionPair> train;
  std::vector<ReactionPair> test;
  double achieved_test_fraction = 0.0;
};

// Assigns whole molecule-sharing components to the test side (largest
// first) until the requested fraction is reached, so no molecule ever
// appears on both sides.
SplitResult disjoint_split(const std::vector<ReactionPair>& pairs,
                           double test_fraction_target);

// A stereo molecule paired with its stereo-stripped partner; the partner is
// the preferred (easier) member.
struct ChiralityPair {
  std::string with_stereo;
  std::string without_stereo;
};

std::vector<ChiralityPair> make_chirality_pairs(
    const std::vector<std::string>& smiles, int n, std::uint64_t seed);

}  // namespace synthrank

#endif
