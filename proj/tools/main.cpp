//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthrank/csv.hpp"
#include "synthrank/datapipe.hpp"
#include "synthrank/metrics.hpp"
#include "synthrank/pairing.hpp"
#include "synthrank/reward.hpp"
#include "synthrank/service.hpp"
#include "synthrank/training.hpp"

namespace fs = std::filesystem;
using namespace synthrank;

namespace {

// exit codes: 0 ok, 2 input/usage, 3 data/value, 4 checkpoint, 1 unexpected
constexpr int kOk = 0;
constexpr int kUnexpected = 1;
constexpr int kInputError = 2;
constexpr int kDataError = 3;
constexpr int kCheckpointError = 4;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ModelFlags {
  std::string architecture = "gglggl";
  int hidden = 128;
  int heads = 8;
  int head_hidden = 256;
  int head_layers = 3;
  double dropout = 0.2;
  int fp_bits = 2048;
  int fp_radius = 4;
  std::string fp_variant = "counts";
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--arch", architecture,
                    "model architecture: gglggl | ggg | fp-mlp");
    cmd->add_option("--hidden", hidden, "GNN hidden size");
    cmd->add_option("--heads", heads, "attention heads per GATv2 layer");
    cmd->add_option("--head-hidden", head_hidden, "MLP head width");
    cmd->add_option("--dropout", dropout, "dropout rate");
    cmd->add_option("--fp-bits", fp_bits, "fingerprint width (fp-mlp)");
    cmd->add_option("--fp-radius", fp_radius, "fingerprint radius (fp-mlp)");
    cmd->add_option("--fp-variant", fp_variant,
                    "boolean | counts | boolean_chiral | counts_chiral");
    cmd->add_option("--seed", seed, "initialization seed");
  }

  ModelConfig to_config() const {
    ModelConfig cfg;
    cfg.architecture = architecture_from_name(architecture);
    cfg.hidden_dim = hidden;
    cfg.heads = heads;
    cfg.head_hidden = head_hidden;
    cfg.head_layers = head_layers;
    cfg.dropout_rate = dropout;
    cfg.fp_bits = fp_bits;
    cfg.fp_radius = fp_radius;
    cfg.fp_variant = fp_variant_from_name(fp_variant);
    cfg.seed = seed;
    return cfg;
  }
};

// Pair every query with its most similar catalog molecule; the catalog
// member is written first (the easier side, target 1). Exact matches drop.
int cmd_pair_catalog(const std::string& input, const std::string& catalog_path,
                     const std::string& output) {
  CsvTable mol_table = read_csv(input);
  int mol_col = mol_table.require_column("smiles");
  CsvTable cat_table = read_csv(catalog_path);
  int cat_col = cat_table.require_column("smiles");

  std::vector<std::string> query_canonical, query_text;
  std::vector<Fingerprint> query_fps;
  for (std::size_t r = 0; r < mol_table.rows.size(); ++r) {
    Molecule m = parse_smiles(mol_table.rows[r][mol_col]);
    query_canonical.push_back(canonical_form(m));
    query_text.push_back(mol_table.rows[r][mol_col]);
    query_fps.push_back(morgan_fingerprint(m));
  }
  std::vector<CatalogEntry> catalog;
  std::vector<std::string> catalog_text;
  for (std::size_t r = 0; r < cat_table.rows.size(); ++r) {
    Molecule m = parse_smiles(cat_table.rows[r][cat_col]);
    catalog.push_back({canonical_form(m), morgan_fingerprint(m)});
    catalog_text.push_back(cat_table.rows[r][cat_col]);
  }
  auto matched = pair_with_catalog(query_canonical, query_fps, catalog);
  std::vector<std::vector<std::string>> rows;
  for (const CatalogPair& p : matched) {
    rows.push_back({catalog_text[p.catalog], query_text[p.query], "1"});
  }
  write_csv(output, {"smiles_i", "smiles_j", "target"}, rows);
  std::cout << "wrote " << rows.size() << " catalog pairs ("
            << (query_canonical.size() - rows.size())
            << " exact matches dropped) to " << output << "\n";
  return kOk;
}

int cmd_pair(const std::string& input, const std::string& checkpoint,
             const std::string& output, std::uint64_t seed, int samples,
             double rate, const std::string& mode_name, bool literal_min,
             const std::string& label_column) {
  ScoreModel<float> model = load_checkpoint(checkpoint);
  CsvTable table = read_csv(input);
  int smiles_col = table.require_column("smiles");
  int label_col = label_column.empty() ? -1 : table.column(label_column);
  if (!label_column.empty() && label_col < 0) {
    throw IoError("input is missing the label column '" + label_column + "'");
  }

  std::vector<Molecule> mols;
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    try {
      mols.push_back(parse_smiles(table.rows[r][smiles_col]));
    } catch (const ParseError& e) {
      throw IoError("row " + std::to_string(r + 2) + ": " + e.what());
    }
    texts.push_back(table.rows[r][smiles_col]);
    if (label_col >= 0) {
      labels.push_back(table.rows[r][label_col] == "1" ? 1 : 0);
    }
  }
  if (mols.size() < 4) throw ValueError("need at least 4 molecules to pair");

  std::vector<Fingerprint> fps;
  fps.reserve(mols.size());
  for (const Molecule& m : mols) fps.push_back(morgan_fingerprint(m));

  PairingMode mode = mode_name == "overlapping" ? PairingMode::kOverlapping
                                                : PairingMode::kUnique;
  std::size_t budget = mode == PairingMode::kUnique ? mols.size() / 2
                                                    : mols.size();
  ClusterConfig cluster_cfg = ClusterConfig::for_budget(budget, seed);
  // keep the queried range feasible for small inputs
  cluster_cfg.k_min = std::min<int>(cluster_cfg.k_min,
                                    static_cast<int>(mols.size()) - 1);
  int k = select_k_silhouette(fps, cluster_cfg, literal_min);
  KmeansResult km = kmeans_tanimoto(fps, k, seed);

  std::optional<std::vector<int>> label_opt;
  if (label_col >= 0) label_opt = labels;
  auto assembled = assemble_pairs(km.assignment, label_opt, mode, seed);
  if (assembled.empty()) {
    std::cerr << "warning: no pair satisfies the constraints; wrote an "
                 "empty file\n";
  }

  std::vector<PreferencePair> pairs;
  for (const AssembledPair& ap : assembled) {
    PreferencePair p;
    p.a = make_model_input(mols[ap.first], model.config);
    p.b = make_model_input(mols[ap.second], model.config);
    p.smiles_a = texts[ap.first];
    p.smiles_b = texts[ap.second];
    if (ap.label) p.label = *ap.label;
    pairs.push_back(std::move(p));
  }
  auto ranked = rank_by_uncertainty(model, pairs, samples, rate, seed);

  std::vector<std::vector<std::string>> rows;
  bool with_target = label_col >= 0;
  for (const UncertainPair& u : ranked) {
    const PreferencePair& p = pairs[u.pair_index];
    std::vector<std::string> row{p.smiles_a, p.smiles_b,
                                 format_double(u.variance)};
    if (with_target) row.push_back(std::to_string(p.label));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> header{"smiles_i", "smiles_j", "variance"};
  if (with_target) header.push_back("target");
  write_csv(output, header, rows);
  std::cout << "wrote " << rows.size() << " pairs (k=" << k << ") to "
            << output << "\n";
  return kOk;
}

int cmd_pretrain(const std::string& pairs_path, const std::string& out_dir,
                 const ModelFlags& mf, PretrainConfig tc) {
  ModelConfig cfg = mf.to_config();
  auto model = init_model<float>(cfg);
  auto pairs = load_pair_csv(pairs_path, cfg, false);
  TrainHistory history = pretrain(model, pairs, tc);
  save_checkpoint(model, out_dir, "pretrain:" + pairs_path);
  write_history_jsonl(history, (fs::path(out_dir) / "history.jsonl").string());
  PairEval eval = evaluate_pairs(model, pairs);
  std::cout << "pretrained on " << pairs.size() << " pairs; train Acc "
            << eval.accuracy << ", AUC " << eval.auc_on_delta << "\n"
            << "checkpoint: " << out_dir << "\n";
  return kOk;
}

int cmd_finetune(const std::string& pairs_path, const std::string& checkpoint,
                 const std::string& out_dir, const std::string& holdout_path,
                 FinetuneConfig fc, bool lr_given) {
  ScoreModel<float> model = load_checkpoint(checkpoint);
  if (!lr_given) fc.lr = FinetuneConfig::default_lr(model.config.architecture);
  auto pairs = load_pair_csv(pairs_path, model.config, true);
  std::vector<PreferencePair> holdout;
  if (!holdout_path.empty()) {
    holdout = load_pair_csv(holdout_path, model.config, true);
  }
  double acc_before = evaluate_pairs(model, pairs).accuracy;
  TrainHistory history = finetune(model, pairs, fc, holdout);
  save_checkpoint(model, out_dir, "finetune:" + pairs_path);
  write_history_jsonl(history, (fs::path(out_dir) / "history.jsonl").string());
  double acc_after = evaluate_pairs(model, pairs).accuracy;
  std::cout << "fine-tuned on " << pairs.size() << " pairs; Acc "
            << acc_before << " -> " << acc_after << "\n"
            << "checkpoint: " << out_dir << "\n";
  return kOk;
}

int cmd_score(const std::string& input, const std::string& checkpoint,
              const std::string& output) {
  ScoreModel<float> model = load_checkpoint(checkpoint);
  CsvTable table = read_csv(input);
  int col = table.require_column("smiles");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& text = table.rows[r][col];
    Molecule mol;
    try {
      mol = parse_smiles(text);
    } catch (const ParseError& e) {
      throw IoError("row " + std::to_string(r + 2) + ": " + e.what());
    }
    double s = score_value(model, make_model_input(mol, model.config));
    rows.push_back({text, format_double(s)});
  }
  write_csv(output, {"smiles", "score"}, rows);
  std::cout << "scored " << rows.size() << " molecules to " << output << "\n";
  return kOk;
}

int cmd_eval(const std::string& pairs_path, const std::string& checkpoint) {
  ScoreModel<float> model = load_checkpoint(checkpoint);
  auto pairs = load_pair_csv(pairs_path, model.config, true);
  PairEval eval = evaluate_pairs(model, pairs);
  std::vector<double> deltas, labels;
  for (const auto& p : pairs) {
    deltas.push_back(pair_delta(model, p));
    labels.push_back(static_cast<double>(p.label));
  }
  std::cout << "Acc " << eval.accuracy << "\n";
  std::cout << "AUC " << eval.auc_on_delta << "\n";
  try {
    std::cout << "PCC " << pcc(deltas, labels) << "\n";
  } catch (const ValueError&) {
    std::cout << "PCC undefined\n";
  }
  return kOk;
}

int cmd_prepare(const std::string& input, const std::string& out_dir,
                const std::string& reactant_col, const std::string& product_col,
                double test_fraction, int chirality_n, std::uint64_t seed) {
  fs::create_directories(out_dir);
  FilterResult filtered = load_and_filter(input, reactant_col, product_col);
  {
    std::ofstream os(fs::path(out_dir) / "rejections.json");
    os << filtered.report.to_json() << "\n";
  }
  ReactionNetwork net = build_network(filtered.pairs);
  CycleRemoval removal = remove_cycles_dfs(net);
  auto pairs = apply_cycle_removal(filtered.pairs, removal);
  SplitResult split = disjoint_split(pairs, test_fraction);

  auto write_pairs = [](const std::string& path,
                        const std::vector<ReactionPair>& ps) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : ps) rows.push_back({p.reactant, p.product, "1"});
    write_csv(path, {"smiles_i", "smiles_j", "target"}, rows);
  };
  write_pairs((fs::path(out_dir) / "train.csv").string(), split.train);
  write_pairs((fs::path(out_dir) / "test.csv").string(), split.test);

  std::cout << "kept " << pairs.size() << " pairs ("
            << removal.removed.size() << " cycle edges removed); test fraction "
            << split.achieved_test_fraction << "\n";

  if (chirality_n > 0) {
    std::vector<std::string> all;
    for (const auto& p : pairs) {
      all.push_back(p.reactant);
      all.push_back(p.product);
    }
    try {
      auto chir = make_chirality_pairs(all, chirality_n, seed);
      std::vector<std::vector<std::string>> rows;
      for (const auto& c : chir) {
        // the stripped member is the easier one
        rows.push_back({c.without_stereo, c.with_stereo, "1"});
      }
      write_csv((fs::path(out_dir) / "chirality.csv").string(),
                {"smiles_i", "smiles_j", "target"}, rows);
      std::cout << "wrote " << rows.size() << " chirality pairs\n";
    } catch (const ValueError& e) {
      std::cerr << "chirality set skipped: " << e.what() << "\n";
    }
  }
  return kOk;
}

int cmd_serve(const ServiceConfig& cfg) {
  Service service(cfg);
  std::cout << "serving on http://" << cfg.host << ":" << cfg.port
            << " (data root: " << cfg.data_root << ")\n";
  if (!service.run()) {
    throw IoError("could not bind port " + std::to_string(cfg.port));
  }
  return kOk;
}

int cmd_reward(double x, const std::string& kind, double a, double b,
               double k, double c_se, double c_si, double c_div) {
  double value;
  if (kind == "sigmoid") {
    value = sigmoid_reward(x, SigmoidTransform{a, b, k});
  } else {
    value = double_sigmoid_reward(x, DoubleSigmoidTransform{a, b, c_se, c_si,
                                                            c_div});
  }
  std::cout << format_double(value) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthrank: molecular synthesizability ranking toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a config file");

  // pair
  auto* pair_cmd = app.add_subcommand(
      "pair", "cluster molecules, assemble pairs, rank by uncertainty");
  std::string pair_input, pair_ckpt, pair_output = "pairs.csv";
  std::string pair_mode = "unique", pair_label_col, pair_catalog;
  std::uint64_t pair_seed = 0;
  int pair_samples = 100;
  double pair_rate = 0.2;
  bool pair_literal_min = false;
  pair_cmd->add_option("--input", pair_input, "molecule csv with a smiles column")
      ->required();
  pair_cmd->add_option("--checkpoint", pair_ckpt, "model checkpoint directory");
  pair_cmd->add_option("--output", pair_output, "ranked pair csv");
  pair_cmd->add_option("--catalog", pair_catalog,
                       "purchasable-catalog csv (smiles column); pairs each "
                       "input molecule with its nearest catalog entry "
                       "instead of clustering");
  pair_cmd->add_option("--seed", pair_seed, "seed");
  pair_cmd->add_option("--samples", pair_samples, "MC-dropout samples");
  pair_cmd->add_option("--rate", pair_rate, "MC-dropout rate");
  pair_cmd->add_option("--mode", pair_mode, "unique | overlapping");
  pair_cmd->add_option("--label-column", pair_label_col,
                       "binary label column (1 = easy) for opposed pairs");
  pair_cmd->add_flag("--silhouette-literal-min", pair_literal_min,
                     "pick k with the smallest mean silhouette");

  // pretrain
  auto* pre_cmd = app.add_subcommand("pretrain", "train a model from scratch");
  std::string pre_pairs, pre_out = "checkpoint";
  ModelFlags pre_model;
  PretrainConfig pre_cfg;
  pre_cmd->add_option("--pairs", pre_pairs, "pair csv (smiles_i,smiles_j[,target])")
      ->required();
  pre_cmd->add_option("--out", pre_out, "output checkpoint directory");
  pre_model.attach(pre_cmd);
  pre_cmd->add_option("--chunks", pre_cfg.chunks, "sequential chunks");
  pre_cmd->add_option("--epochs-per-chunk", pre_cfg.epochs_per_chunk,
                      "epochs per chunk");
  pre_cmd->add_option("--batch", pre_cfg.batch, "batch size");
  pre_cmd->add_option("--lr", pre_cfg.lr, "learning rate");
  pre_cmd->add_option("--lambda", pre_cfg.lambda, "score regularization");
  pre_cmd->add_option("--train-seed", pre_cfg.seed, "training seed");

  // finetune
  auto* ft_cmd = app.add_subcommand("finetune", "fine-tune a checkpoint");
  std::string ft_pairs, ft_ckpt, ft_out = "checkpoint-ft", ft_holdout;
  FinetuneConfig ft_cfg;
  bool ft_no_val = false;
  ft_cmd->add_option("--pairs", ft_pairs, "labeled pair csv")->required();
  ft_cmd->add_option("--checkpoint", ft_ckpt, "input checkpoint")->required();
  ft_cmd->add_option("--out", ft_out, "output checkpoint directory");
  ft_cmd->add_option("--holdout", ft_holdout,
                     "labeled pairs guarding against forgetting");
  auto* lr_opt = ft_cmd->add_option("--lr", ft_cfg.lr,
                                    "learning rate (default per architecture)");
  ft_cmd->add_option("--batch", ft_cfg.batch, "batch size");
  ft_cmd->add_option("--max-epochs", ft_cfg.max_epochs, "epoch cap");
  ft_cmd->add_option("--val-pairs", ft_cfg.val_pairs, "validation pair count");
  ft_cmd->add_option("--lambda", ft_cfg.lambda, "score regularization");
  ft_cmd->add_option("--train-seed", ft_cfg.seed, "training seed");
  ft_cmd->add_flag("--no-validation", ft_no_val,
                   "production mode: track training loss instead");

  // score
  auto* score_cmd = app.add_subcommand("score", "score molecules");
  std::string score_input, score_ckpt, score_output = "scores.csv";
  score_cmd->add_option("--input", score_input, "molecule csv with smiles column")
      ->required();
  score_cmd->add_option("--checkpoint", score_ckpt, "checkpoint")->required();
  score_cmd->add_option("--output", score_output, "output csv");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate on labeled pairs");
  std::string eval_pairs, eval_ckpt;
  eval_cmd->add_option("--pairs", eval_pairs, "labeled pair csv")->required();
  eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint")->required();

  // prepare
  auto* prep_cmd = app.add_subcommand(
      "prepare", "build a pre-training corpus from reaction data");
  std::string prep_input, prep_out = "corpus";
  std::string prep_rcol = "reactant", prep_pcol = "product";
  double prep_frac = 0.2;
  int prep_chir = 0;
  std::uint64_t prep_seed = 0;
  prep_cmd->add_option("--input", prep_input, "reaction csv/tsv")->required();
  prep_cmd->add_option("--out", prep_out, "output directory");
  prep_cmd->add_option("--reactant-column", prep_rcol, "reactant column name");
  prep_cmd->add_option("--product-column", prep_pcol, "product column name");
  prep_cmd->add_option("--test-fraction", prep_frac, "disjoint test fraction");
  prep_cmd->add_option("--chirality-pairs", prep_chir,
                       "also emit this many chirality pairs");
  prep_cmd->add_option("--seed", prep_seed, "sampling seed");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "run the labeling service");
  ServiceConfig serve_cfg;
  if (const char* env_root = std::getenv("SYNTHRANK_DATA_ROOT")) {
    serve_cfg.data_root = env_root;
  }
  serve_cmd->add_option("--data-root", serve_cfg.data_root,
                        "directory with unlabeled/, labels/, models/ "
                        "(default: $SYNTHRANK_DATA_ROOT)");
  serve_cmd->add_option("--checkpoint", serve_cfg.base_checkpoint,
                        "base model checkpoint");
  serve_cmd->add_option("--holdout", serve_cfg.holdout_csv,
                        "labeled holdout pairs for early stopping");
  serve_cmd->add_option("--web-root", serve_cfg.web_root, "static UI files");
  serve_cmd->add_option("--host", serve_cfg.host, "bind address");
  serve_cmd->add_option("--port", serve_cfg.port, "port");

  // reward
  auto* reward_cmd =
      app.add_subcommand("reward", "evaluate a score-to-reward transform");
  double rw_x = 0, rw_a = 0, rw_b = 500, rw_k = 0.25;
  double rw_cse = 500, rw_csi = 500, rw_cdiv = 250;
  std::string rw_kind = "sigmoid";
  reward_cmd->add_option("--x", rw_x, "input score")->required();
  reward_cmd->add_option("--kind", rw_kind, "sigmoid | double-sigmoid");
  reward_cmd->add_option("--a", rw_a, "lower anchor");
  reward_cmd->add_option("--b", rw_b, "upper anchor");
  reward_cmd->add_option("--k", rw_k, "sigmoid steepness");
  reward_cmd->add_option("--c-se", rw_cse, "double-sigmoid falling coefficient");
  reward_cmd->add_option("--c-si", rw_csi, "double-sigmoid rising coefficient");
  reward_cmd->add_option("--c-div", rw_cdiv, "double-sigmoid divisor");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pair_cmd->parsed()) {
      if (!pair_catalog.empty()) {
        return cmd_pair_catalog(pair_input, pair_catalog, pair_output);
      }
      if (pair_ckpt.empty()) {
        std::cerr << "input error: --checkpoint is required unless "
                     "--catalog is given\n";
        return kInputError;
      }
      return cmd_pair(pair_input, pair_ckpt, pair_output, pair_seed,
                      pair_samples, pair_rate, pair_mode, pair_literal_min,
                      pair_label_col);
    }
    if (pre_cmd->parsed()) {
      return cmd_pretrain(pre_pairs, pre_out, pre_model, pre_cfg);
    }
    if (ft_cmd->parsed()) {
      ft_cfg.use_validation = !ft_no_val;
      return cmd_finetune(ft_pairs, ft_ckpt, ft_out, ft_holdout, ft_cfg,
                          lr_opt->count() > 0);
    }
    if (score_cmd->parsed()) {
      return cmd_score(score_input, score_ckpt, score_output);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_pairs, eval_ckpt);
    }
    if (prep_cmd->parsed()) {
      return cmd_prepare(prep_input, prep_out, prep_rcol, prep_pcol,
                         prep_frac, prep_chir, prep_seed);
    }
    if (serve_cmd->parsed()) {
      return cmd_serve(serve_cfg);
    }
    if (reward_cmd->parsed()) {
      return cmd_reward(rw_x, rw_kind, rw_a, rw_b, rw_k, rw_cse, rw_csi,
                        rw_cdiv);
    }
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kCheckpointError;
  } catch (const ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kOk;
}
