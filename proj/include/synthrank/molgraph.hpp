//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_MOLGRAPH_HPP
#define SYNTHRANK_MOLGRAPH_HPP

#include <utility>
#include <vector>

#include "synthrank/smiles.hpp"

namespace synthrank {

// Node feature layout, in block order:
//   atom type (14) | charge (10) | hydrogens (6) | degree (6) | ring (1) |
//   aromatic (1) | hybridization (9) | chiral tag (4)
// Every one-hot block reserves its last slot for out-of-choice values.
inline constexpr int kNodeFeatureWidth = 51;

// Edge feature layout: bond type (5) | conjugated (1) | ring (1)
inline constexpr int kEdgeFeatureWidth = 7;

struct FeatureGraph {
  int level = 0;
  int n_nodes = 0;
  int node_width = kNodeFeatureWidth;
  std::vector<float> node_features;  // row-major, n_nodes x node_width

  // Undirected edges stored once, lexicographic by (min, max) endpoint.
  std::vector<std::pair<int, int>> edges;
  int edge_width = 0;                // kEdgeFeatureWidth at level 0, else 0
  std::vector<float> edge_features;  // row-major, edges.size() x edge_width

  int n_edges() const { return static_cast<int>(edges.size()); }
  const float* node_row(int i) const {
    return node_features.data() + static_cast<std::size_t>(i) * node_width;
  }
};

struct GraphBundle {
  std::vector<FeatureGraph> levels;  // levels[k] is the k-th line graph
};

FeatureGraph featurize(const Molecule& mol);

// Nodes are the input's edges in stored order; two nodes are adjacent when
// the corresponding edges share an endpoint. Node feature = sum of the two
// endpoint feature rows, plus (level 0 only) the edge feature row padded
// with zeros to the node width. Line graphs carry no edge features.
FeatureGraph line_graph(const FeatureGraph& g);

GraphBundle build_bundle(const Molecule& mol, int max_level);

}  // namespace synthrank

#endif
