//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_TRAINING_HPP
#define SYNTHRANK_TRAINING_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "synthrank/model.hpp"

namespace synthrank {

// One training unit: two molecules and a binary preference.
// label == 1 means the first member is preferred as MORE synthesizable.
struct PreferencePair {
  ModelInput a;
  ModelInput b;
  std::string smiles_a;  // canonical
  std::string smiles_b;
  int label = 1;
  std::string source;
};

struct LossConfig {
  double lambda = 1e-4;  // weight of the centering regularizer
};

// L = BCE(sigmoid(s_i - s_j), y) + lambda * mean(s_i^2, s_j^2), evaluated in
// logit space so large deltas never overflow.
double pairwise_loss(double score_i, double score_j, int y,
                     const LossConfig& cfg = {});

// Same loss as a tape node, for training and gradient checks.
template <typename T>
int pairwise_loss_node(Tape<T>& tape, int score_i, int score_j, int y,
                       double lambda) {
  int delta = tape.sub(score_i, score_j);
  int bce = tape.softplus(tape.scale(delta, y == 1 ? T(-1) : T(1)));
  if (lambda == 0.0) return bce;
  int reg = tape.scale(tape.add(tape.square(score_i), tape.square(score_j)),
                       static_cast<T>(lambda / 2.0));
  return tape.add(bce, reg);
}

struct PretrainConfig {
  int chunks = 25;
  int epochs_per_chunk = 10;
  int batch = 128;
  double lr = 3e-4;
  double lambda = 1e-4;
  std::uint64_t seed = 0;
};

struct FinetuneConfig {
  int batch = 4;
  double lr = 1e-4;  // 3e-4 is the fingerprint-model default
  double lambda = 1e-4;
  int val_pairs = 5;
  bool use_validation = true;  // production mode tracks training loss instead
  int max_epochs = 20;
  int patience = 3;
  double acc_delta = 0.02;
  std::uint64_t seed = 0;

  static double default_lr(Architecture arch) {
    return arch == Architecture::kFpMlp ? 3e-4 : 1e-4;
  }
};

// Stops once the tracked loss has increased for `patience` consecutive
// epochs, or the holdout accuracy has sat more than `acc_delta` below its
// best for `patience` consecutive epochs, or `max_epochs` is reached.
// Once set, the stop flag stays set.
struct EarlyStopState {
  int patience = 3;
  double acc_delta = 0.02;
  int max_epochs = 20;

  int epoch = 0;
  double prior_loss = std::numeric_limits<double>::infinity();
  int loss_increase_count = 0;
  double best_acc = -std::numeric_limits<double>::infinity();
  int acc_drop_count = 0;
  bool stopped = false;

  // Feed one epoch's observation; returns the (monotone) stop flag.
  bool observe(double loss, std::optional<double> holdout_accuracy);
};

struct EpochRecord {
  int epoch = 0;
  std::string split;  // "train", "val", "holdout"
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> records;
};

void write_history_jsonl(const TrainHistory& history, const std::string& path);

// Sequential pre-training: one seeded shuffle, `chunks` equal slices, each
// trained for epochs_per_chunk epochs with Adam.
TrainHistory pretrain(ScoreModel<float>& model,
                      const std::vector<PreferencePair>& pairs,
                      const PretrainConfig& cfg);

// Fine-tuning with all weights trainable and the dual early-stopping rule.
// `holdout` is a fixed labeled set whose accuracy guards against forgetting;
// pass an empty vector to disable that rule.
TrainHistory finetune(ScoreModel<float>& model,
                      const std::vector<PreferencePair>& pairs,
                      const FinetuneConfig& cfg,
                      const std::vector<PreferencePair>& holdout);

struct PairEval {
  double accuracy = 0.0;      // ties count as wrong
  double auc_on_delta = 0.5;  // AUC over the symmetrized delta set
};

PairEval evaluate_pairs(const ScoreModel<float>& model,
                        const std::vector<PreferencePair>& pairs);

// Eval-mode score difference f(a) - f(b) for one pair.
double pair_delta(const ScoreModel<float>& model, const PreferencePair& pair);

}  // namespace synthrank

#endif
