//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_SERVICE_HPP
#define SYNTHRANK_SERVICE_HPP

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "synthrank/training.hpp"

namespace synthrank {

// ---------------------------------------------------------------------------
// Datasets on disk (the CSV conventions shared by the CLI and the service).

// `smiles` column -> parsed molecules (throws on the first bad row, with the
// row number and parser message).
std::vector<Molecule> load_molecule_csv(const std::string& path);

// `smiles_i,smiles_j[,target]` -> featurized preference pairs for the given
// model config. Rows whose members have the same canonical form are dropped.
std::vector<PreferencePair> load_pair_csv(const std::string& path,
                                          const ModelConfig& cfg,
                                          bool require_target);

// ---------------------------------------------------------------------------
// Label sessions

struct RankedPair {
  int pair_id = 0;
  std::string smiles_i;
  std::string smiles_j;
  double variance = 0.0;
};

struct LabelRecord {
  int pair_id = 0;
  std::string harder;  // "i" or "j"
  std::string labeler;
  std::int64_t timestamp = 0;
};

// The single point converting a human "harder" verdict into the training
// target: the target is 1 when the first member is the easier one, i.e.
// exactly when the second member was called harder.
int label_to_target(const std::string& harder);

// One labeling session: a ranked pair file plus an append-only JSONL label
// log. All mutation goes through submit(), which appends to the log before
// updating memory; rebuilding from the log reproduces the state.
class LabelSession {
 public:
  LabelSession(std::string id, std::vector<RankedPair> pairs,
               std::string log_path);

  static std::vector<RankedPair> load_ranked_csv(const std::string& path);

  const std::string& id() const { return id_; }
  const std::vector<RankedPair>& pairs() const { return pairs_; }

  // Highest-variance unlabeled pair (pairs are stored ranked); empty when
  // everything is labeled.
  std::optional<RankedPair> next_unlabeled() const;

  enum class SubmitOutcome { kRecorded, kNoop, kConflict, kUnknownPair };
  SubmitOutcome submit(int pair_id, const std::string& harder,
                       const std::string& labeler);

  std::map<int, std::string> labels() const;  // pair_id -> harder
  std::vector<LabelRecord> log_records() const;

  // Labeled pairs as training examples under the given model config.
  std::vector<PreferencePair> to_training_pairs(const ModelConfig& cfg) const;

 private:
  void replay_log();

  std::string id_;
  std::vector<RankedPair> pairs_;
  std::string log_path_;
  mutable std::mutex mu_;
  std::map<int, std::string> labels_;
};

// ---------------------------------------------------------------------------
// Jobs

struct JobRecord {
  std::string id;
  std::string kind;
  std::string state;  // queued | running | done | failed
  std::string detail;
};

// One worker thread, jobs run strictly one at a time; states only move
// forward (queued -> running -> done/failed).
class JobQueue {
 public:
  JobQueue();
  ~JobQueue();

  std::string enqueue(const std::string& kind,
                      std::function<std::string()> work);
  std::optional<JobRecord> get(const std::string& id) const;
  bool busy() const;
  void wait_idle();  // blocks until the queue drains (used by tests/CLI)

 private:
  void worker_loop();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  std::map<std::string, JobRecord> jobs_;
  std::map<std::string, std::function<std::string()>> work_;
  std::atomic<bool> stopping_{false};
  int running_ = 0;
  int counter_ = 0;
  std::thread worker_;
};

// ---------------------------------------------------------------------------
// HTTP service

struct ServiceConfig {
  std::string data_root = "synthrank-data";
  std::string base_checkpoint;      // required for /api/score and fine-tuning
  std::string holdout_csv;          // optional labeled pairs for early stop
  std::string web_root = "web";     // static UI files, served when present
  std::string host = "127.0.0.1";
  int port = 8711;
  FinetuneConfig finetune;
};

class Service {
 public:
  explicit Service(ServiceConfig cfg);
  ~Service();

  // Serves until stop(); returns false if the port could not be bound.
  bool run();
  // Starts in a background thread and waits until the socket listens.
  bool start_background();
  void stop();

  int port() const { return cfg_.port; }

 private:
  struct Impl;
  ServiceConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace synthrank

#endif
