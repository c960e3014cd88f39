//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_PAIRING_HPP
#define SYNTHRANK_PAIRING_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthrank/fingerprint.hpp"
#include "synthrank/training.hpp"

namespace synthrank {

struct ClusterConfig {
  int k_min = 3;
  int k_max = 9;
  int max_iterations = 100;
  std::uint64_t seed = 0;

  // Datasets above 500 pairs query k in [5,29], smaller ones [3,9].
  static ClusterConfig for_budget(std::size_t pair_budget,
                                  std::uint64_t seed = 0) {
    ClusterConfig cfg;
    cfg.seed = seed;
    if (pair_budget > 500) {
      cfg.k_min = 5;
      cfg.k_max = 29;
    }
    return cfg;
  }
};

using Centroid = std::map<std::uint32_t, double>;

struct KmeansResult {
  std::vector<int> assignment;
  std::vector<Centroid> centroids;
  double objective = 0.0;             // sum of point-to-centroid distances
  std::vector<double> objective_trace;  // per accepted iteration
};

// MinMax Tanimoto distance between a counts fingerprint and a real-valued
// centroid: 1 - sum(min)/sum(max).
double centroid_distance(const Fingerprint& fp, const Centroid& c);

// k-means over count fingerprints with k-means++ seeding, arithmetic-mean
// centroids and Tanimoto distances; empty clusters are re-seeded from the
// farthest point. The recorded objective never increases.
KmeansResult kmeans_tanimoto(const std::vector<Fingerprint>& fps, int k,
                             std::uint64_t seed, int max_iterations = 100);

double mean_silhouette(const std::vector<Fingerprint>& fps,
                       const std::vector<int>& assignment, int k);

// Runs k-means for every k in the configured range and returns the k with
// the best mean silhouette (ties: smaller k). `literal_minimum` selects the
// smallest mean instead of the largest.
int select_k_silhouette(const std::vector<Fingerprint>& fps,
                        const ClusterConfig& cfg,
                        bool literal_minimum = false);

enum class PairingMode { kUnique, kOverlapping };

struct AssembledPair {
  int first = 0;
  int second = 0;
  // 1 when `first` is the preferred (more synthesizable) member; unset when
  // the input had no labels.
  std::optional<int> label;
};

// Pairs always cross clusters; with labels the members oppose each other and
// the pair label points at the positive-label member. Unique mode uses every
// molecule at most once; overlapping mode lets molecules repeat (one pair
// per eligible molecule). Unsatisfiable constraints yield an empty result.
std::vector<AssembledPair> assemble_pairs(
    const std::vector<int>& clusters,
    const std::optional<std::vector<int>>& labels, PairingMode mode,
    std::uint64_t seed);

struct UncertainPair {
  std::size_t pair_index = 0;
  double variance = 0.0;
};

// Monte-Carlo-dropout uncertainty: n_samples stochastic forward passes of
// delta = f(a) - f(b) per pair, population variance, stable sort by
// descending variance. Bit-reproducible for a fixed seed.
std::vector<UncertainPair> rank_by_uncertainty(
    const ScoreModel<float>& model, const std::vector<PreferencePair>& pairs,
    int n_samples = 100, double rate = 0.2, std::uint64_t seed = 0);

// Continuous-score labelling (complexity scale: higher = harder): the pair
// is labelable only when the scores differ by at least `threshold`; the
// returned label is 1 when the first value is lower (easier).
std::optional<int> label_from_continuous(double v_i, double v_j,
                                         double threshold = 2.0);

struct CatalogEntry {
  std::string smiles;  // canonical
  Fingerprint fp;
};

struct CatalogPair {
  int query = 0;
  int catalog = 0;
  double similarity = 0.0;
};

// Pairs each query with its most similar catalog molecule (ties: lowest
// catalog index); queries exactly matching a catalog entry are dropped.
// The catalog member is the preferred side when converted to training pairs.
std::vector<CatalogPair> pair_with_catalog(
    const std::vector<std::string>& query_smiles,
    const std::vector<Fingerprint>& query_fps,
    const std::vector<CatalogEntry>& catalog);

}  // namespace synthrank

#endif
