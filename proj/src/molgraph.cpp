//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/molgraph.hpp"

#include <algorithm>

#include "synthrank/errors.hpp"

namespace synthrank {

namespace {

// Feature-block atom-type ordering (differs from Element declaration order).
int atom_type_slot(Element e) {
  switch (e) {
    case Element::H: return 0;
    case Element::B: return 1;
    case Element::C: return 2;
    case Element::N: return 3;
    case Element::O: return 4;
    case Element::F: return 5;
    case Element::Si: return 6;
    case Element::P: return 7;
    case Element::S: return 8;
    case Element::Cl: return 9;
    case Element::Br: return 10;
    case Element::I: return 11;
    case Element::Se: return 12;
  }
  return 13;
}

// Writes a one-hot block of `size` slots; `slot` < 0 or >= size-1 lands in
// the trailing overflow slot.
void one_hot(float* row, int& offset, int size, int slot) {
  if (slot < 0 || slot >= size - 1) slot = size - 1;
  row[offset + slot] = 1.0f;
  offset += size;
}

int hybridization_slot(Hybridization h) {
  switch (h) {
    case Hybridization::kUnspecified: return 0;
    case Hybridization::kS: return 1;
    case Hybridization::kSp: return 2;
    case Hybridization::kSp2: return 3;
    case Hybridization::kSp3: return 4;
    case Hybridization::kSp3d: return 5;
    case Hybridization::kSp3d2: return 6;
    case Hybridization::kOther: return 7;
  }
  return 7;
}

}  // namespace

FeatureGraph featurize(const Molecule& mol) {
  FeatureGraph g;
  g.level = 0;
  g.n_nodes = mol.num_atoms();
  g.node_width = kNodeFeatureWidth;
  g.edge_width = kEdgeFeatureWidth;
  g.node_features.assign(
      static_cast<std::size_t>(g.n_nodes) * kNodeFeatureWidth, 0.0f);

  for (int i = 0; i < g.n_nodes; ++i) {
    const Atom& a = mol.atoms[i];
    float* row = g.node_features.data() +
                 static_cast<std::size_t>(i) * kNodeFeatureWidth;
    int off = 0;
    one_hot(row, off, 14, atom_type_slot(a.element));
    one_hot(row, off, 10, a.formal_charge + 4);
    one_hot(row, off, 6, a.total_h());
    one_hot(row, off, 6, a.degree);
    row[off++] = a.in_ring ? 1.0f : 0.0f;
    row[off++] = a.aromatic ? 1.0f : 0.0f;
    one_hot(row, off, 9, hybridization_slot(perceive_hybridization(mol, i)));
    int chiral_slot;
    switch (a.parity) {
      case StereoParity::kParity1: chiral_slot = 0; break;  // "S" slot
      case StereoParity::kParity2: chiral_slot = 1; break;  // "R" slot
      default: chiral_slot = 2; break;                      // unassigned
    }
    one_hot(row, off, 4, chiral_slot);
  }

  // Stable edge order: lexicographic by (min, max) endpoint, carrying the
  // originating bond along for the feature row.
  std::vector<std::pair<std::pair<int, int>, int>> sorted_bonds;
  sorted_bonds.reserve(mol.bonds.size());
  for (int bi = 0; bi < mol.num_bonds(); ++bi) {
    const Bond& b = mol.bonds[bi];
    sorted_bonds.push_back({{std::min(b.a, b.b), std::max(b.a, b.b)}, bi});
  }
  std::sort(sorted_bonds.begin(), sorted_bonds.end());

  g.edge_features.assign(sorted_bonds.size() * kEdgeFeatureWidth, 0.0f);
  for (std::size_t k = 0; k < sorted_bonds.size(); ++k) {
    g.edges.push_back(sorted_bonds[k].first);
    const Bond& b = mol.bonds[sorted_bonds[k].second];
    float* row = g.edge_features.data() + k * kEdgeFeatureWidth;
    int off = 0;
    one_hot(row, off, 5, static_cast<int>(b.order));
    row[off++] = b.conjugated ? 1.0f : 0.0f;
    row[off++] = b.in_ring ? 1.0f : 0.0f;
  }
  return g;
}

FeatureGraph line_graph(const FeatureGraph& g) {
  FeatureGraph out;
  out.level = g.level + 1;
  out.n_nodes = g.n_edges();
  out.node_width = g.node_width;
  out.edge_width = 0;
  out.node_features.assign(
      static_cast<std::size_t>(out.n_nodes) * out.node_width, 0.0f);

  for (int k = 0; k < out.n_nodes; ++k) {
    auto [u, v] = g.edges[k];
    float* row = out.node_features.data() +
                 static_cast<std::size_t>(k) * out.node_width;
    const float* fu = g.node_row(u);
    const float* fv = g.node_row(v);
    for (int c = 0; c < g.node_width; ++c) {
      row[c] = fu[c] + fv[c];
    }
    if (g.level == 0 && g.edge_width > 0) {
      const float* fe =
          g.edge_features.data() + static_cast<std::size_t>(k) * g.edge_width;
      for (int c = 0; c < g.edge_width && c < out.node_width; ++c) {
        row[c] += fe[c];
      }
    }
  }

  // Two line-graph nodes are adjacent iff the edges share an endpoint.
  // Group edge ids by endpoint; every pair within a group is adjacent.
  std::vector<std::vector<int>> incident;
  int max_node = 0;
  for (auto& [u, v] : g.edges) max_node = std::max({max_node, u + 1, v + 1});
  incident.resize(max_node);
  for (int k = 0; k < g.n_edges(); ++k) {
    incident[g.edges[k].first].push_back(k);
    incident[g.edges[k].second].push_back(k);
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& group : incident) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        pairs.emplace_back(std::min(group[i], group[j]),
                           std::max(group[i], group[j]));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  out.edges = std::move(pairs);
  return out;
}

GraphBundle build_bundle(const Molecule& mol, int max_level) {
  if (max_level < 0) throw ValueError("max_level must be >= 0");
  GraphBundle b;
  b.levels.push_back(featurize(mol));
  for (int k = 0; k < max_level; ++k) {
    b.levels.push_back(line_graph(b.levels.back()));
  }
  return b;
}

}  // namespace synthrank
