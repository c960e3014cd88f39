//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "synthrank/pairing.hpp"
#include "testdata.hpp"

using namespace synthrank;

namespace {

// Synthetic count fingerprint with support in [base, base+width).
Fingerprint blob_point(int base, RngStream& rng, int width = 20) {
  Fingerprint fp;
  fp.variant = FpVariant::kCounts;
  for (int i = 0; i < width; ++i) {
    fp.data[static_cast<std::uint32_t>(base + i)] =
        4 + static_cast<std::uint32_t>(rng.next_below(3));
  }
  return fp;
}

std::vector<Fingerprint> three_blobs(int per_blob, std::uint64_t seed,
                                     std::vector<int>* truth = nullptr) {
  RngStream rng(seed);
  std::vector<Fingerprint> fps;
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < per_blob; ++i) {
      fps.push_back(blob_point(1000 * b, rng));
      if (truth) truth->push_back(b);
    }
  }
  return fps;
}

}  // namespace

TEST_CASE("blob construction has the intended geometry") {
  std::vector<Fingerprint> fps = three_blobs(5, 1);
  for (int i = 0; i < 5; ++i) {
    for (int j = 5; j < 10; ++j) {
      CHECK(tanimoto_similarity(fps[i], fps[j]) < 0.1);
    }
    for (int j = 0; j < 5; ++j) {
      CHECK(tanimoto_similarity(fps[i], fps[j]) > 0.8);
    }
  }
}

TEST_CASE("kmeans separates duplicate groups exactly") {
  Fingerprint a, b;
  a.data = {{1, 3}, {2, 1}};
  b.data = {{50, 2}, {60, 4}};
  std::vector<Fingerprint> fps{a, a, a, b, b};
  KmeansResult km = kmeans_tanimoto(fps, 2, 7);
  CHECK(km.assignment[0] == km.assignment[1]);
  CHECK(km.assignment[1] == km.assignment[2]);
  CHECK(km.assignment[3] == km.assignment[4]);
  CHECK(km.assignment[0] != km.assignment[3]);
  for (std::size_t i = 0; i < fps.size(); ++i) {
    CHECK(centroid_distance(fps[i], km.centroids[km.assignment[i]]) ==
          doctest::Approx(0.0));
  }
  CHECK(km.objective == doctest::Approx(0.0));
}

TEST_CASE("k equal to n gives singleton clusters for distinct points") {
  RngStream rng(3);
  std::vector<Fingerprint> fps;
  for (int i = 0; i < 6; ++i) fps.push_back(blob_point(100 * i, rng, 8));
  KmeansResult km = kmeans_tanimoto(fps, 6, 11);
  std::set<int> distinct(km.assignment.begin(), km.assignment.end());
  CHECK(distinct.size() == 6);
}

TEST_CASE("three well-separated blobs are recovered with k=3") {
  std::vector<int> truth;
  std::vector<Fingerprint> fps = three_blobs(10, 21, &truth);
  KmeansResult km = kmeans_tanimoto(fps, 3, 5);
  // match up to relabeling: every blob maps to exactly one cluster
  for (int b = 0; b < 3; ++b) {
    std::set<int> ids;
    for (int i = 0; i < 30; ++i) {
      if (truth[i] == b) ids.insert(km.assignment[i]);
    }
    CHECK(ids.size() == 1);
  }
  std::set<int> all(km.assignment.begin(), km.assignment.end());
  CHECK(all.size() == 3);
}

TEST_CASE("kmeans objective never increases") {
  RngStream rng(17);
  for (int t = 0; t < 10; ++t) {
    std::vector<Fingerprint> fps;
    for (int i = 0; i < 25; ++i) {
      fps.push_back(blob_point(static_cast<int>(rng.next_below(6)) * 40, rng, 12));
    }
    KmeansResult km = kmeans_tanimoto(fps, 4, t);
    for (std::size_t i = 1; i < km.objective_trace.size(); ++i) {
      CHECK(km.objective_trace[i] <= km.objective_trace[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("kmeans argument validation") {
  std::vector<Fingerprint> none;
  CHECK_THROWS_AS(kmeans_tanimoto(none, 2, 0), ValueError);
  RngStream rng(1);
  std::vector<Fingerprint> one{blob_point(0, rng, 4)};
  CHECK_THROWS_AS(kmeans_tanimoto(one, 5, 0), ValueError);
}

TEST_CASE("silhouette selects the natural k for two blobs") {
  RngStream rng(9);
  std::vector<Fingerprint> fps;
  for (int i = 0; i < 12; ++i) fps.push_back(blob_point(0, rng));
  for (int i = 0; i < 12; ++i) fps.push_back(blob_point(5000, rng));
  ClusterConfig cfg;
  cfg.k_min = 2;
  cfg.k_max = 4;
  cfg.seed = 13;
  CHECK(select_k_silhouette(fps, cfg) == 2);
  KmeansResult km = kmeans_tanimoto(fps, 2, cfg.seed);
  CHECK(mean_silhouette(fps, km.assignment, 2) > 0.8);
}

TEST_CASE("silhouette values stay within [-1, 1]") {
  RngStream rng(44);
  for (int t = 0; t < 10; ++t) {
    std::vector<Fingerprint> fps;
    for (int i = 0; i < 20; ++i) {
      fps.push_back(blob_point(static_cast<int>(rng.next_below(4)) * 30, rng, 10));
    }
    for (int k = 2; k <= 5; ++k) {
      KmeansResult km = kmeans_tanimoto(fps, k, t);
      double s = mean_silhouette(fps, km.assignment, k);
      CHECK(s >= -1.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("identical points fall back to the smallest k") {
  RngStream rng(2);
  Fingerprint p = blob_point(0, rng);
  std::vector<Fingerprint> fps(10, p);
  ClusterConfig cfg;
  cfg.k_min = 2;
  cfg.k_max = 5;
  CHECK(select_k_silhouette(fps, cfg) == 2);
}

TEST_CASE("k range rules from the pair budget") {
  ClusterConfig big = ClusterConfig::for_budget(600);
  CHECK(big.k_min == 5);
  CHECK(big.k_max == 29);
  ClusterConfig small = ClusterConfig::for_budget(300);
  CHECK(small.k_min == 3);
  CHECK(small.k_max == 9);
  CHECK(ClusterConfig::for_budget(500).k_min == 3);  // "larger than 500"
}

TEST_CASE("range exceeding n is rejected") {
  RngStream rng(8);
  std::vector<Fingerprint> fps;
  for (int i = 0; i < 3; ++i) fps.push_back(blob_point(i * 50, rng));
  ClusterConfig cfg;
  cfg.k_min = 3;
  cfg.k_max = 9;
  CHECK_THROWS_AS(select_k_silhouette(fps, cfg), ValueError);
}

TEST_CASE("assemble_pairs: hand case with two clusters and labels") {
  std::vector<int> clusters{0, 0, 1, 1};
  std::vector<int> labels{1, 1, 0, 0};
  auto pairs = assemble_pairs(clusters, labels, PairingMode::kUnique, 3);
  REQUIRE(pairs.size() == 2);
  std::set<int> used;
  for (const auto& p : pairs) {
    CHECK(clusters[p.first] != clusters[p.second]);
    CHECK(labels[p.first] != labels[p.second]);
    CHECK(p.label.has_value());
    CHECK(*p.label == (labels[p.first] == 1 ? 1 : 0));
    used.insert(p.first);
    used.insert(p.second);
  }
  CHECK(used.size() == 4);
}

TEST_CASE("assemble_pairs: one cluster yields nothing in unique mode") {
  std::vector<int> clusters{0, 0, 0, 0};
  auto pairs = assemble_pairs(clusters, std::nullopt, PairingMode::kUnique, 1);
  CHECK(pairs.empty());
}

TEST_CASE("assemble_pairs properties over random datasets") {
  RngStream rng(123);
  for (int t = 0; t < 200; ++t) {
    int n = 2 + static_cast<int>(rng.next_below(40));
    int n_clusters = 1 + static_cast<int>(rng.next_below(5));
    std::vector<int> clusters(n), labels(n);
    for (int i = 0; i < n; ++i) {
      clusters[i] = static_cast<int>(rng.next_below(n_clusters));
      labels[i] = static_cast<int>(rng.next_below(2));
    }
    bool with_labels = rng.next_double() < 0.7;
    std::optional<std::vector<int>> lab;
    if (with_labels) lab = labels;

    auto unique = assemble_pairs(clusters, lab, PairingMode::kUnique, t);
    CHECK(unique.size() <= static_cast<std::size_t>(n / 2));
    std::set<int> seen;
    for (const auto& p : unique) {
      CHECK(clusters[p.first] != clusters[p.second]);
      if (with_labels) {
        CHECK(labels[p.first] != labels[p.second]);
        CHECK(*p.label == (labels[p.first] == 1 ? 1 : 0));
      }
      CHECK(seen.insert(p.first).second);
      CHECK(seen.insert(p.second).second);
    }

    auto overlap = assemble_pairs(clusters, lab, PairingMode::kOverlapping, t);
    for (const auto& p : overlap) {
      CHECK(clusters[p.first] != clusters[p.second]);
      if (with_labels) CHECK(labels[p.first] != labels[p.second]);
    }
  }
}

TEST_CASE("mc-dropout variance: zero rate, positive rate, reproducibility") {
  ModelConfig cfg;
  cfg.hidden_dim = 16;
  cfg.heads = 4;
  cfg.head_hidden = 32;
  cfg.seed = 4;
  auto model = init_model<float>(cfg);
  auto pairs = testutil::size_preference_dataset(6, 31, cfg);

  auto zero = rank_by_uncertainty(model, pairs, 10, 0.0, 99);
  for (const auto& u : zero) CHECK(u.variance == 0.0);

  auto ranked = rank_by_uncertainty(model, pairs, 25, 0.2, 99);
  CHECK(ranked.size() == pairs.size());
  CHECK(ranked.front().variance > 0.0);
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK(ranked[i - 1].variance >= ranked[i].variance);
  }
  std::set<std::size_t> indices;
  for (const auto& u : ranked) indices.insert(u.pair_index);
  CHECK(indices.size() == pairs.size());

  auto again = rank_by_uncertainty(model, pairs, 25, 0.2, 99);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(ranked[i].pair_index == again[i].pair_index);
    CHECK(ranked[i].variance == again[i].variance);
  }

  CHECK_THROWS_AS(rank_by_uncertainty(model, pairs, 1, 0.2, 0), ValueError);
}

TEST_CASE("labels from continuous complexity scores") {
  CHECK(label_from_continuous(1.0, 4.0).value() == 1);
  CHECK(label_from_continuous(4.0, 1.0).value() == 0);
  CHECK(!label_from_continuous(2.0, 3.0).has_value());
  CHECK(!label_from_continuous(2.5, 2.5).has_value());
  CHECK(label_from_continuous(1.0, 3.0).has_value());  // exactly threshold
}

TEST_CASE("catalog pairing matches a brute-force argmax") {
  RngStream rng(5);
  std::vector<CatalogEntry> catalog;
  for (int c = 0; c < 5; ++c) {
    catalog.push_back({"cat" + std::to_string(c), blob_point(c * 100, rng)});
  }
  std::vector<std::string> queries;
  std::vector<Fingerprint> qfps;
  for (int q = 0; q < 3; ++q) {
    queries.push_back("query" + std::to_string(q));
    qfps.push_back(blob_point(q * 100 + 5, rng));
  }
  auto pairs = pair_with_catalog(queries, qfps, catalog);
  REQUIRE(pairs.size() == 3);
  for (const auto& p : pairs) {
    double best = -1.0;
    int arg = 0;
    for (int c = 0; c < 5; ++c) {
      double s = tanimoto_similarity(qfps[p.query], catalog[c].fp);
      if (s > best) {
        best = s;
        arg = c;
      }
    }
    CHECK(p.catalog == arg);
    CHECK(p.similarity == doctest::Approx(best));
  }

  // exact canonical match is dropped
  std::vector<std::string> q2{"cat2"};
  std::vector<Fingerprint> q2fps{catalog[2].fp};
  CHECK(pair_with_catalog(q2, q2fps, catalog).empty());

  std::vector<CatalogEntry> empty;
  CHECK_THROWS_AS(pair_with_catalog(queries, qfps, empty), ValueError);
}
