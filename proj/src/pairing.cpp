//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "synthrank/errors.hpp"
#include "synthrank/rng.hpp"

namespace synthrank {

double centroid_distance(const Fingerprint& fp, const Centroid& c) {
  double min_sum = 0.0, max_sum = 0.0;
  auto ia = fp.data.begin();
  auto ib = c.begin();
  while (ia != fp.data.end() || ib != c.end()) {
    if (ib == c.end() || (ia != fp.data.end() && ia->first < ib->first)) {
      max_sum += ia->second;
      ++ia;
    } else if (ia == fp.data.end() || ib->first < ia->first) {
      max_sum += ib->second;
      ++ib;
    } else {
      double a = ia->second, b = ib->second;
      min_sum += std::min(a, b);
      max_sum += std::max(a, b);
      ++ia;
      ++ib;
    }
  }
  if (max_sum == 0.0) return 0.0;
  return 1.0 - min_sum / max_sum;
}

namespace {

Centroid centroid_of_point(const Fingerprint& fp) {
  Centroid c;
  for (auto& [pos, count] : fp.data) c[pos] = count;
  return c;
}

std::vector<int> assign_all(const std::vector<Fingerprint>& fps,
                            const std::vector<Centroid>& centroids) {
  std::vector<int> out(fps.size(), 0);
  for (std::size_t i = 0; i < fps.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      double d = centroid_distance(fps[i], centroids[k]);
      if (d < best) {
        best = d;
        out[i] = static_cast<int>(k);
      }
    }
  }
  return out;
}

double objective_of(const std::vector<Fingerprint>& fps,
                    const std::vector<int>& assign,
                    const std::vector<Centroid>& centroids) {
  double obj = 0.0;
  for (std::size_t i = 0; i < fps.size(); ++i) {
    obj += centroid_distance(fps[i], centroids[assign[i]]);
  }
  return obj;
}

std::vector<Centroid> kmeanspp_init(const std::vector<Fingerprint>& fps,
                                    int k, RngStream& rng) {
  std::vector<Centroid> centroids;
  std::vector<bool> used(fps.size(), false);
  std::size_t first = rng.next_below(fps.size());
  centroids.push_back(centroid_of_point(fps[first]));
  used[first] = true;
  std::vector<double> weight(fps.size());
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < fps.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Centroid& c : centroids) {
        best = std::min(best, centroid_distance(fps[i], c));
      }
      weight[i] = used[i] ? 0.0 : best * best;
      total += weight[i];
    }
    std::size_t chosen = fps.size();
    if (total > 0.0) {
      double r = rng.next_double() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < fps.size(); ++i) {
        acc += weight[i];
        if (weight[i] > 0.0 && acc >= r) {
          chosen = i;
          break;
        }
      }
    }
    if (chosen == fps.size()) {
      for (std::size_t i = 0; i < fps.size(); ++i) {
        if (!used[i]) {
          chosen = i;
          break;
        }
      }
    }
    if (chosen == fps.size()) chosen = 0;
    used[chosen] = true;
    centroids.push_back(centroid_of_point(fps[chosen]));
  }
  return centroids;
}

}  // namespace

KmeansResult kmeans_tanimoto(const std::vector<Fingerprint>& fps, int k,
                             std::uint64_t seed, int max_iterations) {
  if (fps.empty()) throw ValueError("kmeans: no points");
  if (k < 1 || k > static_cast<int>(fps.size())) {
    throw ValueError("kmeans: k must lie in [1, n]");
  }
  RngStream rng(seed, 0x6b6d);

  KmeansResult res;
  res.centroids = kmeanspp_init(fps, k, rng);
  res.assignment = assign_all(fps, res.centroids);
  res.objective = objective_of(fps, res.assignment, res.centroids);
  res.objective_trace.push_back(res.objective);

  for (int it = 0; it < max_iterations; ++it) {
    // Mean update; empty clusters re-seed from the point farthest from its
    // current centroid.
    std::vector<std::vector<int>> members(k);
    for (std::size_t i = 0; i < fps.size(); ++i) {
      members[res.assignment[i]].push_back(static_cast<int>(i));
    }
    std::vector<Centroid> next(k);
    for (int c = 0; c < k; ++c) {
      if (members[c].empty()) {
        double worst = -1.0;
        std::size_t farthest = 0;
        for (std::size_t i = 0; i < fps.size(); ++i) {
          double d =
              centroid_distance(fps[i], res.centroids[res.assignment[i]]);
          if (d > worst) {
            worst = d;
            farthest = i;
          }
        }
        next[c] = centroid_of_point(fps[farthest]);
        continue;
      }
      Centroid mean;
      for (int m : members[c]) {
        for (auto& [pos, count] : fps[m].data) {
          mean[pos] += count;
        }
      }
      for (auto& [pos, v] : mean) {
        v /= static_cast<double>(members[c].size());
      }
      next[c] = std::move(mean);
    }

    std::vector<int> next_assign = assign_all(fps, next);
    double next_obj = objective_of(fps, next_assign, next);
    // Tanimoto distances do not certify the mean update, so a step that
    // would raise the objective is rejected and iteration stops there.
    if (next_obj > res.objective + 1e-12) break;
    bool changed = next_assign != res.assignment;
    res.centroids = std::move(next);
    res.assignment = std::move(next_assign);
    res.objective = next_obj;
    res.objective_trace.push_back(next_obj);
    if (!changed) break;
  }
  return res;
}

double mean_silhouette(const std::vector<Fingerprint>& fps,
                       const std::vector<int>& assignment, int k) {
  std::size_t n = fps.size();
  if (assignment.size() != n) throw ValueError("silhouette: size mismatch");
  std::vector<int> cluster_size(k, 0);
  for (int a : assignment) ++cluster_size[a];

  // sum of distances from i to every cluster, built from one pass over pairs
  std::vector<std::vector<double>> sum_to(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = tanimoto_distance(fps[i], fps[j]);
      sum_to[i][assignment[j]] += d;
      sum_to[j][assignment[i]] += d;
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    int own = assignment[i];
    if (cluster_size[own] <= 1) continue;  // singleton: s(i) = 0
    double a = sum_to[i][own] / static_cast<double>(cluster_size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || cluster_size[c] == 0) continue;
      b = std::min(b, sum_to[i][c] / static_cast<double>(cluster_size[c]));
    }
    if (!std::isfinite(b)) continue;  // only one non-empty cluster
    double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

int select_k_silhouette(const std::vector<Fingerprint>& fps,
                        const ClusterConfig& cfg, bool literal_minimum) {
  int n = static_cast<int>(fps.size());
  if (cfg.k_min > cfg.k_max) throw ValueError("empty k range");
  if (cfg.k_min >= n) {
    throw ValueError("k range exceeds the number of points (" +
                     std::to_string(n) + ")");
  }
  int k_hi = std::min(cfg.k_max, n - 1);
  int best_k = cfg.k_min;
  double best_score = literal_minimum
                          ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
  for (int k = cfg.k_min; k <= k_hi; ++k) {
    KmeansResult km = kmeans_tanimoto(fps, k, cfg.seed, cfg.max_iterations);
    double s = mean_silhouette(fps, km.assignment, k);
    bool better = literal_minimum ? s < best_score : s > best_score;
    if (better) {
      best_score = s;
      best_k = k;
    }
  }
  return best_k;
}

std::vector<AssembledPair> assemble_pairs(
    const std::vector<int>& clusters,
    const std::optional<std::vector<int>>& labels, PairingMode mode,
    std::uint64_t seed) {
  std::size_t n = clusters.size();
  if (labels && labels->size() != n) {
    throw ValueError("assemble_pairs: labels/clusters size mismatch");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, 0xA55E);
  rng.shuffle(order);

  auto compatible = [&](int i, int j) {
    if (clusters[i] == clusters[j]) return false;
    if (labels && (*labels)[i] == (*labels)[j]) return false;
    return true;
  };
  auto finish = [&](int i, int j) {
    AssembledPair p;
    p.first = i;
    p.second = j;
    if (labels) p.label = (*labels)[i] == 1 ? 1 : 0;
    return p;
  };

  std::vector<AssembledPair> out;
  if (mode == PairingMode::kUnique) {
    std::vector<bool> used(n, false);
    for (std::size_t a = 0; a < n; ++a) {
      int i = order[a];
      if (used[i]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        int j = order[b];
        if (used[j] || !compatible(i, j)) continue;
        used[i] = used[j] = true;
        out.push_back(finish(i, j));
        break;
      }
    }
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      int i = order[a];
      std::vector<int> candidates;
      for (std::size_t j = 0; j < n; ++j) {
        if (static_cast<int>(j) != i && compatible(i, static_cast<int>(j))) {
          candidates.push_back(static_cast<int>(j));
        }
      }
      if (candidates.empty()) continue;
      int j = candidates[rng.next_below(candidates.size())];
      out.push_back(finish(i, j));
    }
  }
  return out;
}

std::vector<UncertainPair> rank_by_uncertainty(
    const ScoreModel<float>& model, const std::vector<PreferencePair>& pairs,
    int n_samples, double rate, std::uint64_t seed) {
  if (n_samples < 2) throw ValueError("rank_by_uncertainty: n_samples >= 2");
  std::vector<UncertainPair> out;
  out.reserve(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::vector<double> deltas;
    deltas.reserve(n_samples);
    for (int s = 0; s < n_samples; ++s) {
      Tape<float> tape;
      std::vector<int> ids = place_params(tape, model, false);
      RngStream rng_a(seed, mix64(p, 2 * s));
      RngStream rng_b(seed, mix64(p, 2 * s + 1));
      int sa = forward_score(tape, model, ids, pairs[p].a,
                             ForwardMode::kMcDropout, rng_a, rate);
      int sb = forward_score(tape, model, ids, pairs[p].b,
                             ForwardMode::kMcDropout, rng_b, rate);
      deltas.push_back(static_cast<double>(tape.value(sa).data[0]) -
                       static_cast<double>(tape.value(sb).data[0]));
    }
    double mean = 0.0;
    for (double d : deltas) mean += d;
    mean /= static_cast<double>(deltas.size());
    double var = 0.0;
    for (double d : deltas) var += (d - mean) * (d - mean);
    var /= static_cast<double>(deltas.size());
    out.push_back({p, var});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const UncertainPair& a, const UncertainPair& b) {
                     return a.variance > b.variance;
                   });
  return out;
}

std::optional<int> label_from_continuous(double v_i, double v_j,
                                         double threshold) {
  if (std::abs(v_i - v_j) < threshold) return std::nullopt;
  return v_i < v_j ? 1 : 0;
}

std::vector<CatalogPair> pair_with_catalog(
    const std::vector<std::string>& query_smiles,
    const std::vector<Fingerprint>& query_fps,
    const std::vector<CatalogEntry>& catalog) {
  if (catalog.empty()) throw ValueError("pair_with_catalog: empty catalog");
  if (query_smiles.size() != query_fps.size()) {
    throw ValueError("pair_with_catalog: query size mismatch");
  }
  std::vector<CatalogPair> out;
  for (std::size_t q = 0; q < query_smiles.size(); ++q) {
    bool exact = false;
    for (const CatalogEntry& e : catalog) {
      if (e.smiles == query_smiles[q]) {
        exact = true;
        break;
      }
    }
    if (exact) continue;
    int best = 0;
    double best_sim = -1.0;
    for (std::size_t c = 0; c < catalog.size(); ++c) {
      double s = tanimoto_similarity(query_fps[q], catalog[c].fp);
      if (s > best_sim) {
        best_sim = s;
        best = static_cast<int>(c);
      }
    }
    out.push_back({static_cast<int>(q), best, best_sim});
  }
  return out;
}

}  // namespace synthrank
