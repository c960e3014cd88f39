//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthrank/errors.hpp"

namespace synthrank {

BinaryMetrics binary_metrics(const ConfusionCounts& c) {
  if (c.tp < 0 || c.tn < 0 || c.fp < 0 || c.fn < 0) {
    throw ValueError("confusion counts must be non-negative");
  }
  long long total = c.tp + c.tn + c.fp + c.fn;
  if (total == 0) throw ValueError("all confusion counts are zero");
  BinaryMetrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  if (c.tp + c.fn > 0) {
    m.sensitivity =
        static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (c.tn + c.fp > 0) {
    m.specificity =
        static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  }
  return m;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw ValueError("scores and labels must have the same length");
  }
  long long n_pos = 0, n_neg = 0;
  for (int l : labels) (l ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) {
    throw ValueError("auc needs both classes present");
  }

  // Rank-sum with average ranks over tie groups: U = R_pos - n_pos(n_pos+1)/2,
  // equal to #[pos > neg] + 0.5 #[pos == neg].
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  double u = rank_sum_pos -
             static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double pcc(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValueError("pcc needs equal-length vectors");
  if (x.size() < 2) throw ValueError("pcc needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ValueError("pcc is undefined for zero-variance input");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace synthrank
