//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/service.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "synthrank/csv.hpp"

namespace synthrank {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Dataset loading

std::vector<Molecule> load_molecule_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  int col = table.require_column("smiles");
  std::vector<Molecule> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (static_cast<std::size_t>(col) >= table.rows[r].size()) {
      throw IoError("row " + std::to_string(r + 2) + ": missing smiles field");
    }
    try {
      out.push_back(parse_smiles(table.rows[r][col]));
    } catch (const ParseError& e) {
      throw IoError("row " + std::to_string(r + 2) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PreferencePair> load_pair_csv(const std::string& path,
                                          const ModelConfig& cfg,
                                          bool require_target) {
  CsvTable table = read_csv(path);
  int ci = table.require_column("smiles_i");
  int cj = table.require_column("smiles_j");
  int ct = table.column("target");
  if (require_target && ct < 0) {
    throw IoError("input is missing the required column 'target'");
  }
  std::vector<PreferencePair> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto field = [&](int c) -> std::string {
      return static_cast<std::size_t>(c) < row.size() ? row[c] : "";
    };
    Molecule mi, mj;
    try {
      mi = parse_smiles(field(ci));
      mj = parse_smiles(field(cj));
    } catch (const ParseError& e) {
      throw IoError("row " + std::to_string(r + 2) + ": " + e.what());
    }
    PreferencePair pair;
    pair.smiles_a = canonical_form(mi);
    pair.smiles_b = canonical_form(mj);
    if (pair.smiles_a == pair.smiles_b) continue;  // control row, skip
    pair.a = make_model_input(mi, cfg);
    pair.b = make_model_input(mj, cfg);
    if (ct >= 0) {
      const std::string t = field(ct);
      if (t != "0" && t != "1") {
        if (require_target) {
          throw IoError("row " + std::to_string(r + 2) +
                        ": target must be 0 or 1, got '" + t + "'");
        }
      } else {
        pair.label = t == "1" ? 1 : 0;
      }
    }
    pair.source = path;
    out.push_back(std::move(pair));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Label sessions

int label_to_target(const std::string& harder) {
  if (harder == "j") return 1;  // second harder -> first preferred
  if (harder == "i") return 0;
  throw ValueError("label side must be \"i\" or \"j\", got '" + harder + "'");
}

LabelSession::LabelSession(std::string id, std::vector<RankedPair> pairs,
                           std::string log_path)
    : id_(std::move(id)), pairs_(std::move(pairs)),
      log_path_(std::move(log_path)) {
  replay_log();
}

std::vector<RankedPair> LabelSession::load_ranked_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  int ci = table.require_column("smiles_i");
  int cj = table.require_column("smiles_j");
  int cv = table.column("variance");
  std::vector<RankedPair> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    RankedPair p;
    p.pair_id = static_cast<int>(r);
    p.smiles_i = table.rows[r][ci];
    p.smiles_j = table.rows[r][cj];
    if (cv >= 0 && static_cast<std::size_t>(cv) < table.rows[r].size()) {
      p.variance = std::stod(table.rows[r][cv]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void LabelSession::replay_log() {
  std::ifstream is(log_path_);
  if (!is) return;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    int pair_id = j.value("pair_id", -1);
    std::string harder = j.value("harder", "");
    if (pair_id >= 0 && (harder == "i" || harder == "j")) {
      labels_.emplace(pair_id, harder);  // first record wins, like submit()
    }
  }
}

std::optional<RankedPair> LabelSession::next_unlabeled() const {
  std::lock_guard<std::mutex> lock(mu_);
  for (const RankedPair& p : pairs_) {
    if (!labels_.count(p.pair_id)) return p;
  }
  return std::nullopt;
}

LabelSession::SubmitOutcome LabelSession::submit(int pair_id,
                                                 const std::string& harder,
                                                 const std::string& labeler) {
  if (harder != "i" && harder != "j") {
    throw ValueError("label side must be \"i\" or \"j\"");
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (pair_id < 0 || pair_id >= static_cast<int>(pairs_.size())) {
    return SubmitOutcome::kUnknownPair;
  }
  auto it = labels_.find(pair_id);
  if (it != labels_.end()) {
    return it->second == harder ? SubmitOutcome::kNoop
                                : SubmitOutcome::kConflict;
  }
  // append to the log first; memory only changes if the write sticks
  fs::create_directories(fs::path(log_path_).parent_path());
  std::ofstream os(log_path_, std::ios::app);
  if (!os) throw IoError("cannot append to " + log_path_);
  json j{{"pair_id", pair_id},
         {"harder", harder},
         {"labeler", labeler},
         {"timestamp",
          std::chrono::duration_cast<std::chrono::milliseconds>(
              std::chrono::system_clock::now().time_since_epoch())
              .count()}};
  os << j.dump() << "\n";
  os.flush();
  if (!os) throw IoError("failed appending to " + log_path_);
  labels_.emplace(pair_id, harder);
  return SubmitOutcome::kRecorded;
}

std::map<int, std::string> LabelSession::labels() const {
  std::lock_guard<std::mutex> lock(mu_);
  return labels_;
}

std::vector<LabelRecord> LabelSession::log_records() const {
  std::vector<LabelRecord> out;
  std::ifstream is(log_path_);
  if (!is) return out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    out.push_back({j.value("pair_id", -1), j.value("harder", ""),
                   j.value("labeler", ""), j.value("timestamp", int64_t{0})});
  }
  return out;
}

std::vector<PreferencePair> LabelSession::to_training_pairs(
    const ModelConfig& cfg) const {
  std::map<int, std::string> snapshot = labels();
  std::vector<PreferencePair> out;
  for (const RankedPair& p : pairs_) {
    auto it = snapshot.find(p.pair_id);
    if (it == snapshot.end()) continue;
    Molecule mi = parse_smiles(p.smiles_i);
    Molecule mj = parse_smiles(p.smiles_j);
    PreferencePair pair;
    pair.a = make_model_input(mi, cfg);
    pair.b = make_model_input(mj, cfg);
    pair.smiles_a = canonical_form(mi);
    pair.smiles_b = canonical_form(mj);
    pair.label = label_to_target(it->second);
    pair.source = id_;
    out.push_back(std::move(pair));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Jobs

JobQueue::JobQueue() : worker_([this] { worker_loop(); }) {}

JobQueue::~JobQueue() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

std::string JobQueue::enqueue(const std::string& kind,
                              std::function<std::string()> work) {
  std::lock_guard<std::mutex> lock(mu_);
  std::string id = "job-" + std::to_string(++counter_);
  jobs_[id] = JobRecord{id, kind, "queued", ""};
  work_[id] = std::move(work);
  queue_.push_back(id);
  cv_.notify_one();
  return id;
}

std::optional<JobRecord> JobQueue::get(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

bool JobQueue::busy() const {
  std::lock_guard<std::mutex> lock(mu_);
  return running_ > 0 || !queue_.empty();
}

void JobQueue::wait_idle() {
  std::unique_lock<std::mutex> lock(mu_);
  idle_cv_.wait(lock, [this] { return running_ == 0 && queue_.empty(); });
}

void JobQueue::worker_loop() {
  for (;;) {
    std::function<std::string()> work;
    std::string id;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
      jobs_[id].state = "running";
      work = std::move(work_[id]);
      work_.erase(id);
      ++running_;
    }
    std::string detail;
    bool ok = true;
    try {
      detail = work();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      jobs_[id].state = ok ? "done" : "failed";
      jobs_[id].detail = detail;
      --running_;
    }
    idle_cv_.notify_all();
  }
}

// ---------------------------------------------------------------------------
// HTTP service

struct Service::Impl {
  httplib::Server server;
  std::thread thread;
  JobQueue jobs;
  std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<LabelSession>> sessions;
  std::shared_ptr<const ScoreModel<float>> base_model;
  ServiceConfig cfg;

  explicit Impl(ServiceConfig c) : cfg(std::move(c)) {
    if (!cfg.base_checkpoint.empty()) {
      base_model = std::make_shared<const ScoreModel<float>>(
          load_checkpoint(cfg.base_checkpoint));
    }
    setup_routes();
  }

  std::shared_ptr<LabelSession> session_of(const std::string& name) {
    std::lock_guard<std::mutex> lock(sessions_mu);
    auto it = sessions.find(name);
    if (it != sessions.end()) return it->second;
    fs::path pair_file = fs::path(cfg.data_root) / "unlabeled" / (name + ".csv");
    if (!fs::exists(pair_file)) return nullptr;
    auto session = std::make_shared<LabelSession>(
        name, LabelSession::load_ranked_csv(pair_file.string()),
        (fs::path(cfg.data_root) / "labels" / (name + ".jsonl")).string());
    sessions[name] = session;
    return session;
  }

  ScoreModel<float> model_by_name(const std::string& name) {
    if (name.empty() || name == "base") {
      if (!base_model) throw CheckpointError("no base checkpoint configured");
      return *base_model;
    }
    fs::path dir = fs::path(cfg.data_root) / "models" / name;
    if (!fs::exists(dir)) throw CheckpointError("unknown model: " + name);
    return load_checkpoint(dir.string());
  }

  static void reply_json(httplib::Response& res, int status, json body) {
    body["v"] = 1;
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static json parse_body(const httplib::Request& req) {
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw ValueError("request body is not valid JSON");
    return j;
  }

  void setup_routes() {
    server.Get("/api/pairs/next", [this](const httplib::Request& req,
                                         httplib::Response& res) {
      std::string name = req.get_param_value("session");
      auto session = session_of(name);
      if (!session) {
        reply_json(res, 404, json{{"error", "unknown session: " + name}});
        return;
      }
      auto next = session->next_unlabeled();
      if (!next) {
        reply_json(res, 200, json{{"exhausted", true}});
        return;
      }
      reply_json(res, 200,
                 json{{"pair",
                       {{"pair_id", next->pair_id},
                        {"smiles_i", next->smiles_i},
                        {"smiles_j", next->smiles_j},
                        {"variance", next->variance}}}});
    });

    server.Post("/api/labels", [this](const httplib::Request& req,
                                      httplib::Response& res) {
      json body;
      try {
        body = parse_body(req);
      } catch (const ValueError& e) {
        reply_json(res, 400, json{{"error", e.what()}});
        return;
      }
      if (!body.contains("session") || !body.contains("pair_id") ||
          !body.contains("harder")) {
        reply_json(res, 400,
                   json{{"error", "need session, pair_id and harder"}});
        return;
      }
      std::string harder = body["harder"];
      if (harder != "i" && harder != "j") {
        reply_json(res, 400, json{{"error", "harder must be \"i\" or \"j\""}});
        return;
      }
      auto session = session_of(body["session"]);
      if (!session) {
        reply_json(res, 404, json{{"error", "unknown session"}});
        return;
      }
      auto outcome = session->submit(body["pair_id"], harder,
                                     body.value("labeler", "anonymous"));
      switch (outcome) {
        case LabelSession::SubmitOutcome::kRecorded:
          reply_json(res, 200, json{{"status", "recorded"}});
          break;
        case LabelSession::SubmitOutcome::kNoop:
          reply_json(res, 200, json{{"status", "noop"}});
          break;
        case LabelSession::SubmitOutcome::kConflict:
          reply_json(res, 409,
                     json{{"error", "pair already labeled differently"}});
          break;
        case LabelSession::SubmitOutcome::kUnknownPair:
          reply_json(res, 404, json{{"error", "unknown pair id"}});
          break;
      }
    });

    server.Post("/api/finetune", [this](const httplib::Request& req,
                                        httplib::Response& res) {
      json body;
      try {
        body = parse_body(req);
      } catch (const ValueError& e) {
        reply_json(res, 400, json{{"error", e.what()}});
        return;
      }
      if (!base_model) {
        reply_json(res, 400, json{{"error", "no base checkpoint configured"}});
        return;
      }
      std::string name = body.value("session", "");
      auto session = session_of(name);
      if (!session) {
        reply_json(res, 404, json{{"error", "unknown session"}});
        return;
      }
      if (session->labels().empty()) {
        reply_json(res, 400, json{{"error", "session has no labels yet"}});
        return;
      }
      if (jobs.busy()) {
        reply_json(res, 409, json{{"error", "another job is running"}});
        return;
      }
      FinetuneConfig ft = cfg.finetune;
      ft.lr = body.value("lr", ft.lr);
      ft.batch = body.value("batch", ft.batch);
      ft.max_epochs = body.value("max_epochs", ft.max_epochs);
      ft.use_validation = false;  // service runs in production mode

      std::string id = jobs.enqueue("finetune", [this, session, ft, name] {
        ScoreModel<float> model = *base_model;
        auto pairs = session->to_training_pairs(model.config);
        std::vector<PreferencePair> holdout;
        if (!cfg.holdout_csv.empty()) {
          holdout = load_pair_csv(cfg.holdout_csv, model.config, true);
        }
        TrainHistory history = finetune(model, pairs, ft, holdout);
        fs::path out_dir = fs::path(cfg.data_root) / "models" / (name + "-ft");
        save_checkpoint(model, out_dir.string(), "finetune:" + name);
        write_history_jsonl(history,
                            (out_dir / "history.jsonl").string());
        return out_dir.string();
      });
      reply_json(res, 202, json{{"job", {{"id", id}, {"kind", "finetune"},
                                         {"state", "queued"}}}});
    });

    server.Get(R"(/api/jobs/(.+))", [this](const httplib::Request& req,
                                           httplib::Response& res) {
      auto job = jobs.get(req.matches[1]);
      if (!job) {
        reply_json(res, 404, json{{"error", "unknown job"}});
        return;
      }
      reply_json(res, 200,
                 json{{"job",
                       {{"id", job->id},
                        {"kind", job->kind},
                        {"state", job->state},
                        {"detail", job->detail}}}});
    });

    server.Post("/api/score", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      json body;
      try {
        body = parse_body(req);
      } catch (const ValueError& e) {
        reply_json(res, 400, json{{"error", e.what()}});
        return;
      }
      if (!body.contains("smiles") || !body["smiles"].is_array()) {
        reply_json(res, 400, json{{"error", "need a smiles array"}});
        return;
      }
      ScoreModel<float> model;
      try {
        model = model_by_name(body.value("model", "base"));
      } catch (const CheckpointError& e) {
        reply_json(res, 400, json{{"error", e.what()}});
        return;
      }
      json scores = json::array();
      for (const auto& s : body["smiles"]) {
        if (!s.is_string()) {
          reply_json(res, 400, json{{"error", "smiles entries must be strings"}});
          return;
        }
        try {
          Molecule mol = parse_smiles(s.get<std::string>());
          double score = score_value(model, make_model_input(mol, model.config));
          scores.push_back({{"smiles", s}, {"score", score}});
        } catch (const ParseError& e) {
          reply_json(res, 400,
                     json{{"error", std::string(e.what())},
                          {"smiles", s}});
          return;
        }
      }
      reply_json(res, 200, json{{"scores", scores}});
    });

    server.Get("/api/models", [this](const httplib::Request&,
                                     httplib::Response& res) {
      json models = json::array();
      if (base_model) models.push_back("base");
      fs::path dir = fs::path(cfg.data_root) / "models";
      if (fs::exists(dir)) {
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir)) {
          if (entry.is_directory() &&
              fs::exists(entry.path() / "meta.json")) {
            names.push_back(entry.path().filename().string());
          }
        }
        std::sort(names.begin(), names.end());
        for (auto& n : names) models.push_back(n);
      }
      reply_json(res, 200, json{{"models", models}});
    });

    if (fs::exists(cfg.web_root)) {
      server.set_mount_point("/", cfg.web_root);
    }
  }
};

Service::Service(ServiceConfig cfg)
    : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>(cfg_)) {}

Service::~Service() { stop(); }

bool Service::run() {
  return impl_->server.listen(cfg_.host, cfg_.port);
}

bool Service::start_background() {
  impl_->thread = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
  return impl_->server.is_running();
}

void Service::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
  if (impl_ && impl_->thread.joinable()) {
    impl_->thread.join();
  }
}

}  // namespace synthrank
