//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_TESTS_TESTUTIL_HPP
#define SYNTHRANK_TESTS_TESTUTIL_HPP

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "synthrank/rng.hpp"

namespace synthrank::testutil {

// A random connected molecule over C/N/O with single bonds: a random tree
// plus optionally one ring-closing edge. Valence capacities are respected,
// so any emission order parses cleanly.
struct RandomMol {
  int n = 0;
  std::vector<char> element;                // 'C', 'N', 'O'
  std::vector<std::pair<int, int>> edges;   // undirected
};

inline int capacity_of(char e) { return e == 'C' ? 4 : (e == 'N' ? 3 : 2); }

inline RandomMol random_molecule(RngStream& rng, int n_atoms,
                                 bool allow_ring = true) {
  RandomMol m;
  m.n = n_atoms;
  std::vector<int> degree(n_atoms, 0);
  m.element.resize(n_atoms);
  for (int i = 0; i < n_atoms; ++i) {
    double u = rng.next_double();
    m.element[i] = u < 0.7 ? 'C' : (u < 0.88 ? 'N' : 'O');
  }
  for (int i = 1; i < n_atoms; ++i) {
    // attach to an earlier atom with spare valence
    std::vector<int> candidates;
    for (int j = 0; j < i; ++j) {
      if (degree[j] < capacity_of(m.element[j])) candidates.push_back(j);
    }
    if (candidates.empty()) {
      // give this atom capacity by making every earlier atom carbon
      for (int j = 0; j < i; ++j) m.element[j] = 'C';
      candidates.clear();
      for (int j = 0; j < i; ++j) {
        if (degree[j] < 4) candidates.push_back(j);
      }
    }
    int p = candidates[rng.next_below(candidates.size())];
    m.edges.emplace_back(p, i);
    ++degree[p];
    ++degree[i];
  }
  if (allow_ring && n_atoms >= 3 && rng.next_double() < 0.5) {
    std::vector<std::pair<int, int>> options;
    for (int a = 0; a < n_atoms; ++a) {
      for (int b = a + 1; b < n_atoms; ++b) {
        if (degree[a] >= capacity_of(m.element[a])) continue;
        if (degree[b] >= capacity_of(m.element[b])) continue;
        bool bonded = false;
        for (auto& e : m.edges) {
          if ((e.first == a && e.second == b) ||
              (e.first == b && e.second == a)) {
            bonded = true;
          }
        }
        if (!bonded) options.emplace_back(a, b);
      }
    }
    if (!options.empty()) {
      auto e = options[rng.next_below(options.size())];
      m.edges.push_back(e);
    }
  }
  return m;
}

// Emit one SMILES writing of the molecule. Different rngs give different
// atom emission orders of the same structure.
inline std::string write_smiles(const RandomMol& m, RngStream& rng) {
  std::vector<std::vector<int>> adj(m.n);
  for (int i = 0; i < static_cast<int>(m.edges.size()); ++i) {
    adj[m.edges[i].first].push_back(i);
    adj[m.edges[i].second].push_back(i);
  }
  auto other = [&](int edge, int v) {
    return m.edges[edge].first == v ? m.edges[edge].second
                                    : m.edges[edge].first;
  };

  int root = static_cast<int>(rng.next_below(m.n));
  std::vector<int> parent_edge(m.n, -1);
  std::vector<bool> visited(m.n, false);
  std::vector<bool> edge_used(m.edges.size(), false);
  std::vector<std::vector<int>> children(m.n);
  std::vector<std::pair<int, int>> closures;  // (first atom, second atom)
  std::vector<int> order;

  struct Frame {
    int atom;
    std::vector<int> edges;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  auto shuffled_edges = [&](int v) {
    std::vector<int> out = adj[v];
    rng.shuffle(out);
    return out;
  };
  visited[root] = true;
  order.push_back(root);
  stack.push_back({root, shuffled_edges(root)});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next >= f.edges.size()) {
      stack.pop_back();
      continue;
    }
    int ei = f.edges[f.next++];
    if (edge_used[ei]) continue;
    int to = other(ei, f.atom);
    edge_used[ei] = true;
    if (!visited[to]) {
      visited[to] = true;
      parent_edge[to] = ei;
      children[f.atom].push_back(to);
      order.push_back(to);
      stack.push_back({to, shuffled_edges(to)});
    } else {
      closures.emplace_back(to, f.atom);
    }
  }

  std::vector<std::vector<int>> opens(m.n), closes(m.n);
  std::vector<int> digit(closures.size());
  {
    std::vector<int> pos(m.n);
    for (int i = 0; i < m.n; ++i) pos[order[i]] = i;
    for (int c = 0; c < static_cast<int>(closures.size()); ++c) {
      int a = closures[c].first, b = closures[c].second;
      if (pos[a] > pos[b]) std::swap(a, b);
      opens[a].push_back(c);
      closes[b].push_back(c);
    }
    std::vector<bool> used(100, false);
    for (int v : order) {
      for (int c : closes[v]) used[digit[c]] = false;
      for (int c : opens[v]) {
        int d = 1;
        while (used[d]) ++d;
        digit[c] = d;
        used[d] = true;
      }
    }
  }

  std::string out;
  struct EmitFrame {
    int atom;
    std::size_t child = 0;
    bool paren = false;
  };
  auto emit_atom = [&](int v) {
    out += m.element[v];
    for (int c : closes[v]) out += std::to_string(digit[c]);
    for (int c : opens[v]) out += std::to_string(digit[c]);
  };
  std::vector<EmitFrame> est;
  emit_atom(root);
  est.push_back({root});
  while (!est.empty()) {
    EmitFrame& f = est.back();
    if (f.child >= children[f.atom].size()) {
      est.pop_back();
      if (!est.empty() && est.back().paren) {
        out += ")";
        est.back().paren = false;
      }
      continue;
    }
    int c = children[f.atom][f.child++];
    if (f.child != children[f.atom].size()) {
      out += "(";
      f.paren = true;
    }
    emit_atom(c);
    est.push_back({c});
  }
  return out;
}

}  // namespace synthrank::testutil

#endif
