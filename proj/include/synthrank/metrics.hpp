//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_METRICS_HPP
#define SYNTHRANK_METRICS_HPP

#include <optional>
#include <vector>

namespace synthrank {

struct ConfusionCounts {
  long long tp = 0;
  long long tn = 0;
  long long fp = 0;
  long long fn = 0;
};

// Undefined metrics (zero denominators) come back as empty optionals, never
// as NaN.
struct BinaryMetrics {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
};

BinaryMetrics binary_metrics(const ConfusionCounts& c);

// Mann-Whitney AUC: ties between a positive and a negative score count 0.5.
// Computed via sorted average ranks; both classes must be present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Pearson correlation; throws on degenerate input (length < 2 or zero
// variance).
double pcc(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace synthrank

#endif
