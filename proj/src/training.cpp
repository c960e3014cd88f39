//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "synthrank/metrics.hpp"

namespace synthrank {

double pairwise_loss(double score_i, double score_j, int y,
                     const LossConfig& cfg) {
  double x = (y == 1) ? (score_j - score_i) : (score_i - score_j);
  double bce = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  return bce + cfg.lambda * (score_i * score_i + score_j * score_j) / 2.0;
}

bool EarlyStopState::observe(double loss,
                             std::optional<double> holdout_accuracy) {
  if (stopped) return true;
  ++epoch;
  if (loss > prior_loss) {
    ++loss_increase_count;
  } else {
    loss_increase_count = 0;
  }
  prior_loss = loss;
  if (holdout_accuracy) {
    if (*holdout_accuracy > best_acc) {
      best_acc = *holdout_accuracy;
      acc_drop_count = 0;
    } else if (best_acc - *holdout_accuracy > acc_delta) {
      ++acc_drop_count;
    } else {
      acc_drop_count = 0;
    }
  }
  if (loss_increase_count >= patience || acc_drop_count >= patience ||
      epoch >= max_epochs) {
    stopped = true;
  }
  return stopped;
}

void write_history_jsonl(const TrainHistory& history, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  for (const EpochRecord& r : history.records) {
    nlohmann::json j{{"epoch", r.epoch},
                     {"split", r.split},
                     {"loss", r.loss},
                     {"accuracy", r.accuracy}};
    os << j.dump() << "\n";
  }
}

namespace {

struct BatchStats {
  double loss_sum = 0.0;
  long long pairs = 0;
  long long correct = 0;
};

// One optimizer step over a batch of pairs; returns the mean batch loss and
// sign accuracy of the deltas seen during the (train-mode) forward passes.
BatchStats train_batch(ScoreModel<float>& model, AdamState<float>& adam,
                       const std::vector<PreferencePair>& pairs,
                       const std::vector<int>& batch_idx, double lambda,
                       std::uint64_t seed, std::uint64_t step) {
  Tape<float> tape;
  std::vector<int> param_ids = place_params(tape, model, true);
  int loss_sum = -1;
  BatchStats stats;
  for (std::size_t k = 0; k < batch_idx.size(); ++k) {
    const PreferencePair& pair = pairs[batch_idx[k]];
    RngStream rng_a(seed, mix64(step, 2 * k));
    RngStream rng_b(seed, mix64(step, 2 * k + 1));
    int si = forward_score(tape, model, param_ids, pair.a,
                           ForwardMode::kTrain, rng_a);
    int sj = forward_score(tape, model, param_ids, pair.b,
                           ForwardMode::kTrain, rng_b);
    int loss = pairwise_loss_node(tape, si, sj, pair.label, lambda);
    loss_sum = loss_sum < 0 ? loss : tape.add(loss_sum, loss);

    double delta = static_cast<double>(tape.value(si).data[0]) -
                   static_cast<double>(tape.value(sj).data[0]);
    bool correct = (pair.label == 1) ? delta > 0.0 : delta < 0.0;
    stats.correct += correct ? 1 : 0;
    stats.pairs += 1;
  }
  int mean_loss =
      tape.scale(loss_sum, 1.0f / static_cast<float>(batch_idx.size()));
  double loss_value = tape.value(mean_loss).data[0];
  if (!std::isfinite(loss_value)) {
    throw ValueError("training aborted: non-finite loss at step " +
                     std::to_string(step));
  }
  stats.loss_sum = loss_value * static_cast<double>(batch_idx.size());
  tape.backward(mean_loss);
  std::vector<Tensor<float>> grads;
  grads.reserve(param_ids.size());
  for (int id : param_ids) grads.push_back(tape.grad(id));
  adam_step(model.params, grads, adam);
  return stats;
}

double dataset_loss(const ScoreModel<float>& model,
                    const std::vector<PreferencePair>& pairs, double lambda) {
  double sum = 0.0;
  for (const PreferencePair& p : pairs) {
    double si = score_value(model, p.a);
    double sj = score_value(model, p.b);
    sum += pairwise_loss(si, sj, p.label, LossConfig{lambda});
  }
  return sum / static_cast<double>(pairs.size());
}

}  // namespace

TrainHistory pretrain(ScoreModel<float>& model,
                      const std::vector<PreferencePair>& pairs,
                      const PretrainConfig& cfg) {
  if (pairs.empty()) throw ValueError("pretrain: empty dataset");
  if (cfg.chunks <= 0 || cfg.epochs_per_chunk <= 0 || cfg.batch <= 0) {
    throw ValueError("pretrain: chunks, epochs and batch must be positive");
  }

  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream shuffle_rng(cfg.seed, 0xDA7A);
  shuffle_rng.shuffle(order);

  AdamState<float> adam(cfg.lr);
  adam.init(model.params);

  TrainHistory history;
  std::uint64_t step = 0;
  int global_epoch = 0;
  std::size_t n = order.size();
  std::size_t n_chunks = std::min<std::size_t>(cfg.chunks, n);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    std::size_t begin = c * n / n_chunks;
    std::size_t end = (c + 1) * n / n_chunks;
    std::vector<int> chunk(order.begin() + begin, order.begin() + end);
    for (int e = 0; e < cfg.epochs_per_chunk; ++e) {
      BatchStats epoch_stats;
      for (std::size_t off = 0; off < chunk.size();
           off += static_cast<std::size_t>(cfg.batch)) {
        std::size_t stop = std::min(chunk.size(),
                                    off + static_cast<std::size_t>(cfg.batch));
        std::vector<int> batch(chunk.begin() + off, chunk.begin() + stop);
        BatchStats s = train_batch(model, adam, pairs, batch, cfg.lambda,
                                   cfg.seed, step++);
        epoch_stats.loss_sum += s.loss_sum;
        epoch_stats.pairs += s.pairs;
        epoch_stats.correct += s.correct;
      }
      ++global_epoch;
      history.records.push_back(
          {global_epoch, "train",
           epoch_stats.loss_sum / static_cast<double>(epoch_stats.pairs),
           static_cast<double>(epoch_stats.correct) /
               static_cast<double>(epoch_stats.pairs)});
    }
  }
  return history;
}

TrainHistory finetune(ScoreModel<float>& model,
                      const std::vector<PreferencePair>& pairs,
                      const FinetuneConfig& cfg,
                      const std::vector<PreferencePair>& holdout) {
  if (cfg.use_validation &&
      static_cast<int>(pairs.size()) <= cfg.val_pairs) {
    throw ValueError(
        "finetune: need more than " + std::to_string(cfg.val_pairs) +
        " pairs when a validation split is requested (got " +
        std::to_string(pairs.size()) + ")");
  }
  if (pairs.empty()) throw ValueError("finetune: empty dataset");

  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream shuffle_rng(cfg.seed, 0xF17E);
  shuffle_rng.shuffle(order);

  std::vector<PreferencePair> val_set;
  std::vector<int> train_idx;
  if (cfg.use_validation) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < static_cast<std::size_t>(cfg.val_pairs)) {
        val_set.push_back(pairs[order[i]]);
      } else {
        train_idx.push_back(order[i]);
      }
    }
  } else {
    train_idx = order;
  }

  AdamState<float> adam(cfg.lr);
  adam.init(model.params);

  EarlyStopState stop;
  stop.patience = cfg.patience;
  stop.acc_delta = cfg.acc_delta;
  stop.max_epochs = cfg.max_epochs;

  TrainHistory history;
  std::uint64_t step = 0;
  for (int epoch = 1; !stop.stopped; ++epoch) {
    BatchStats epoch_stats;
    for (std::size_t off = 0; off < train_idx.size();
         off += static_cast<std::size_t>(cfg.batch)) {
      std::size_t stop_at = std::min(
          train_idx.size(), off + static_cast<std::size_t>(cfg.batch));
      std::vector<int> batch(train_idx.begin() + off,
                             train_idx.begin() + stop_at);
      BatchStats s = train_batch(model, adam, pairs, batch, cfg.lambda,
                                 cfg.seed, step++);
      epoch_stats.loss_sum += s.loss_sum;
      epoch_stats.pairs += s.pairs;
      epoch_stats.correct += s.correct;
    }
    double train_loss =
        epoch_stats.loss_sum / static_cast<double>(epoch_stats.pairs);
    history.records.push_back(
        {epoch, "train", train_loss,
         static_cast<double>(epoch_stats.correct) /
             static_cast<double>(epoch_stats.pairs)});

    double tracked_loss = train_loss;
    if (cfg.use_validation) {
      tracked_loss = dataset_loss(model, val_set, cfg.lambda);
      PairEval val_eval = evaluate_pairs(model, val_set);
      history.records.push_back({epoch, "val", tracked_loss,
                                 val_eval.accuracy});
    }
    std::optional<double> holdout_acc;
    if (!holdout.empty()) {
      PairEval h = evaluate_pairs(model, holdout);
      holdout_acc = h.accuracy;
      history.records.push_back(
          {epoch, "holdout", dataset_loss(model, holdout, cfg.lambda),
           h.accuracy});
    }
    stop.observe(tracked_loss, holdout_acc);
  }
  return history;
}

double pair_delta(const ScoreModel<float>& model, const PreferencePair& pair) {
  return score_value(model, pair.a) - score_value(model, pair.b);
}

PairEval evaluate_pairs(const ScoreModel<float>& model,
                        const std::vector<PreferencePair>& pairs) {
  if (pairs.empty()) throw ValueError("evaluate_pairs: empty input");
  PairEval out;
  long long correct = 0;
  std::vector<double> deltas;
  std::vector<int> labels;
  for (const PreferencePair& p : pairs) {
    double d = pair_delta(model, p);
    bool ok = (p.label == 1) ? d > 0.0 : d < 0.0;
    correct += ok ? 1 : 0;
    // Symmetrize so the AUC is defined even when every label is 1 (the
    // pre-training convention): each pair contributes both orientations.
    deltas.push_back(d);
    labels.push_back(p.label);
    deltas.push_back(-d);
    labels.push_back(1 - p.label);
  }
  out.accuracy =
      static_cast<double>(correct) / static_cast<double>(pairs.size());
  out.auc_on_delta = auc(deltas, labels);
  return out;
}

}  // namespace synthrank
