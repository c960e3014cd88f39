//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/datapipe.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "synthrank/csv.hpp"
#include "synthrank/errors.hpp"
#include "synthrank/rng.hpp"

namespace synthrank {

std::string RejectionReport::to_json() const {
  nlohmann::json j{{"total_rows", total_rows}, {"kept", kept}};
  j["rejected"] = nlohmann::json::object();
  for (const auto& [reason, count] : rejected) {
    j["rejected"][reason] = count;
  }
  return j.dump(2);
}

namespace {

// Top-level '.' split; our subset never nests dots inside brackets.
std::vector<std::string> split_components(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const char* reason_for(const ParseError& e) {
  switch (e.kind()) {
    case ParseErrorKind::kUnsupportedElement: return "disallowed_element";
    case ParseErrorKind::kValence: return "valence_violation";
    default: return "parse_error";
  }
}

}  // namespace

FilterResult filter_reaction_rows(
    const std::vector<std::pair<std::string, std::string>>& rows,
    int min_heavy_atoms) {
  FilterResult out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [reactant_field, product_field] : rows) {
    for (const std::string& reactant_text : split_components(reactant_field)) {
      ++out.report.total_rows;
      if (reactant_text.empty() || product_field.empty()) {
        ++out.report.rejected["empty"];
        continue;
      }
      Molecule r, p;
      try {
        r = parse_smiles(reactant_text);
        p = parse_smiles(product_field);
      } catch (const ParseError& e) {
        ++out.report.rejected[reason_for(e)];
        continue;
      }
      std::string reactant = canonical_form(r);
      std::string product = canonical_form(p);
      if (reactant == product) {
        ++out.report.rejected["identical_pair"];
        continue;
      }
      if (heavy_atom_count(r) < min_heavy_atoms ||
          heavy_atom_count(p) < min_heavy_atoms) {
        ++out.report.rejected["too_few_heavy_atoms"];
        continue;
      }
      if (!seen.insert({reactant, product}).second) {
        ++out.report.rejected["duplicate"];
        continue;
      }
      out.pairs.push_back({reactant, product});
      ++out.report.kept;
    }
  }
  return out;
}

FilterResult load_and_filter(const std::string& path,
                             const std::string& reactant_col,
                             const std::string& product_col,
                             int min_heavy_atoms) {
  CsvTable table = read_csv(path);
  int rc = table.require_column(reactant_col);
  int pc = table.require_column(product_col);
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::string r = static_cast<std::size_t>(rc) < row.size() ? row[rc] : "";
    std::string p = static_cast<std::size_t>(pc) < row.size() ? row[pc] : "";
    rows.emplace_back(std::move(r), std::move(p));
  }
  return filter_reaction_rows(rows, min_heavy_atoms);
}

ReactionNetwork build_network(const std::vector<ReactionPair>& pairs) {
  ReactionNetwork net;
  for (const ReactionPair& p : pairs) {
    net.add_edge(p.reactant, p.product);
  }
  return net;
}

CycleRemoval remove_cycles_dfs(const ReactionNetwork& network) {
  CycleRemoval out;
  enum class Color { kWhite, kGray, kBlack };
  std::map<std::string, Color> color;
  for (const auto& [node, _] : network.edges) color[node] = Color::kWhite;

  struct Frame {
    const std::string* node;
    std::set<std::string>::const_iterator next;
    std::set<std::string>::const_iterator end;
  };

  for (const auto& [root, _] : network.edges) {
    if (color[root] != Color::kWhite) continue;
    std::vector<Frame> stack;
    color[root] = Color::kGray;
    const auto& root_succ = network.edges.at(root);
    stack.push_back({&root, root_succ.begin(), root_succ.end()});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == f.end) {
        color[*f.node] = Color::kBlack;
        stack.pop_back();
        continue;
      }
      const std::string& to = *f.next++;
      Color c = color[to];
      if (c == Color::kGray) {
        // back edge: drop it
        out.removed.emplace_back(*f.node, to);
      } else {
        out.pruned.add_edge(*f.node, to);
        if (c == Color::kWhite) {
          color[to] = Color::kGray;
          const auto& succ = network.edges.at(to);
          stack.push_back({&to, succ.begin(), succ.end()});
        }
      }
    }
  }
  // keep isolated nodes
  for (const auto& [node, _] : network.edges) out.pruned.edges[node];
  return out;
}

bool is_acyclic(const ReactionNetwork& network) {
  // Kahn's algorithm
  std::map<std::string, int> indegree;
  for (const auto& [node, succ] : network.edges) {
    indegree[node];
    for (const std::string& t : succ) ++indegree[t];
  }
  std::vector<const std::string*> queue;
  for (const auto& [node, deg] : indegree) {
    if (deg == 0) queue.push_back(&node);
  }
  std::size_t seen = 0;
  while (!queue.empty()) {
    const std::string* n = queue.back();
    queue.pop_back();
    ++seen;
    auto it = network.edges.find(*n);
    if (it == network.edges.end()) continue;
    for (const std::string& t : it->second) {
      if (--indegree[t] == 0) {
        queue.push_back(&indegree.find(t)->first);
      }
    }
  }
  return seen == indegree.size();
}

std::vector<ReactionPair> apply_cycle_removal(
    const std::vector<ReactionPair>& pairs, const CycleRemoval& removal) {
  std::set<std::pair<std::string, std::string>> removed(
      removal.removed.begin(), removal.removed.end());
  std::vector<ReactionPair> out;
  for (const ReactionPair& p : pairs) {
    if (!removed.count({p.reactant, p.product})) out.push_back(p);
  }
  return out;
}

SplitResult disjoint_split(const std::vector<ReactionPair>& pairs,
                           double test_fraction_target) {
  if (test_fraction_target <= 0.0 || test_fraction_target >= 1.0) {
    throw ValueError("test fraction target must lie in (0,1)");
  }
  SplitResult out;
  if (pairs.empty()) return out;

  // union-find over molecules; pairs sharing a molecule share a component
  std::map<std::string, int> mol_id;
  auto id_of = [&](const std::string& s) {
    auto [it, inserted] = mol_id.emplace(s, static_cast<int>(mol_id.size()));
    return it->second;
  };
  std::vector<int> parent;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  };
  for (const ReactionPair& p : pairs) {
    int a = id_of(p.reactant);
    int b = id_of(p.product);
    while (static_cast<int>(parent.size()) < static_cast<int>(mol_id.size())) {
      parent.push_back(static_cast<int>(parent.size()));
    }
    unite(a, b);
  }

  // group pair indices per component
  std::map<int, std::vector<int>> components;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    int root = find(mol_id.at(pairs[i].reactant));
    components[root].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> comps;
  for (auto& [_, idx] : components) comps.push_back(std::move(idx));
  std::sort(comps.begin(), comps.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a.front() < b.front();
            });

  double needed = test_fraction_target * static_cast<double>(pairs.size());
  std::vector<bool> to_test(pairs.size(), false);
  std::size_t test_count = 0;
  for (const auto& comp : comps) {
    if (static_cast<double>(test_count) >= needed) break;
    for (int i : comp) to_test[i] = true;
    test_count += comp.size();
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (to_test[i] ? out.test : out.train).push_back(pairs[i]);
  }
  out.achieved_test_fraction =
      static_cast<double>(out.test.size()) / static_cast<double>(pairs.size());
  return out;
}

std::vector<ChiralityPair> make_chirality_pairs(
    const std::vector<std::string>& smiles, int n, std::uint64_t seed) {
  std::vector<ChiralityPair> candidates;
  for (const std::string& s : smiles) {
    Molecule m;
    try {
      m = parse_smiles(s);
    } catch (const ParseError&) {
      continue;
    }
    if (!m.has_stereo()) continue;
    std::string with = canonical_form(m);
    std::string without = canonical_form(strip_stereo(m));
    if (with == without) continue;  // stripping changed nothing
    candidates.push_back({with, without});
  }
  if (static_cast<int>(candidates.size()) < n) {
    throw ValueError("only " + std::to_string(candidates.size()) +
                     " stereo molecules available, need " + std::to_string(n));
  }
  RngStream rng(seed, 0xC41);
  rng.shuffle(candidates);
  candidates.resize(n);
  return candidates;
}

}  // namespace synthrank
