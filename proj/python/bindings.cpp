//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "synthrank/datapipe.hpp"
#include "synthrank/metrics.hpp"
#include "synthrank/pairing.hpp"
#include "synthrank/reward.hpp"
#include "synthrank/training.hpp"

namespace py = pybind11;
using namespace synthrank;

namespace {

Molecule parse_checked(const std::string& smiles) {
  try {
    return parse_smiles(smiles);
  } catch (const ParseError& e) {
    throw py::value_error(e.what());
  }
}

ModelConfig config_from_kwargs(const std::string& architecture, int hidden,
                               int heads, int head_hidden, double dropout,
                               int fp_bits, const std::string& fp_variant,
                               std::uint64_t seed) {
  ModelConfig cfg;
  cfg.architecture = architecture_from_name(architecture);
  cfg.hidden_dim = hidden;
  cfg.heads = heads;
  cfg.head_hidden = head_hidden;
  cfg.dropout_rate = dropout;
  cfg.fp_bits = fp_bits;
  cfg.fp_variant = fp_variant_from_name(fp_variant);
  cfg.seed = seed;
  return cfg;
}

// Python-facing model handle: a float ScoreModel plus smiles-level helpers.
class PyModel {
 public:
  explicit PyModel(ScoreModel<float> model) : model_(std::move(model)) {}

  static PyModel create(const std::string& architecture, int hidden,
                        int heads, int head_hidden, double dropout,
                        int fp_bits, const std::string& fp_variant,
                        std::uint64_t seed) {
    return PyModel(init_model<float>(config_from_kwargs(
        architecture, hidden, heads, head_hidden, dropout, fp_bits,
        fp_variant, seed)));
  }

  static PyModel load(const std::string& dir) {
    return PyModel(load_checkpoint(dir));
  }

  void save(const std::string& dir) const { save_checkpoint(model_, dir); }

  double score(const std::string& smiles) const {
    Molecule mol = parse_checked(smiles);
    return score_value(model_, make_model_input(mol, model_.config));
  }

  std::vector<double> score_many(const std::vector<std::string>& smiles) const {
    std::vector<double> out;
    out.reserve(smiles.size());
    for (const auto& s : smiles) out.push_back(score(s));
    return out;
  }

  double pair_delta(const std::string& a, const std::string& b) const {
    return score(a) - score(b);
  }

  py::dict config() const {
    py::dict d;
    d["architecture"] = architecture_name(model_.config.architecture);
    d["hidden_dim"] = model_.config.hidden_dim;
    d["heads"] = model_.config.heads;
    d["head_hidden"] = model_.config.head_hidden;
    d["dropout_rate"] = model_.config.dropout_rate;
    d["fp_bits"] = model_.config.fp_bits;
    d["fp_variant"] = fp_variant_name(model_.config.fp_variant);
    d["seed"] = model_.config.seed;
    d["n_parameter_tensors"] = model_.params.size();
    return d;
  }

  PreferencePair build_pair(const std::string& a, const std::string& b,
                            int label) const {
    Molecule ma = parse_checked(a);
    Molecule mb = parse_checked(b);
    PreferencePair p;
    p.a = make_model_input(ma, model_.config);
    p.b = make_model_input(mb, model_.config);
    p.smiles_a = canonical_form(ma);
    p.smiles_b = canonical_form(mb);
    p.label = label;
    return p;
  }

  std::vector<PreferencePair> build_pairs(
      const std::vector<std::tuple<std::string, std::string, int>>& pairs)
      const {
    std::vector<PreferencePair> out;
    out.reserve(pairs.size());
    for (const auto& [a, b, y] : pairs) out.push_back(build_pair(a, b, y));
    return out;
  }

  py::list pretrain_pairs(
      const std::vector<std::tuple<std::string, std::string, int>>& pairs,
      int chunks, int epochs_per_chunk, int batch, double lr, double lambda,
      std::uint64_t seed) {
    PretrainConfig cfg;
    cfg.chunks = chunks;
    cfg.epochs_per_chunk = epochs_per_chunk;
    cfg.batch = batch;
    cfg.lr = lr;
    cfg.lambda = lambda;
    cfg.seed = seed;
    return history_to_list(pretrain(model_, build_pairs(pairs), cfg));
  }

  py::list finetune_pairs(
      const std::vector<std::tuple<std::string, std::string, int>>& pairs,
      const std::vector<std::tuple<std::string, std::string, int>>& holdout,
      int batch, double lr, int max_epochs, bool use_validation,
      std::uint64_t seed) {
    FinetuneConfig cfg;
    cfg.batch = batch;
    cfg.lr = lr > 0 ? lr : FinetuneConfig::default_lr(model_.config.architecture);
    cfg.max_epochs = max_epochs;
    cfg.use_validation = use_validation;
    cfg.seed = seed;
    return history_to_list(
        finetune(model_, build_pairs(pairs), cfg, build_pairs(holdout)));
  }

  py::dict evaluate(
      const std::vector<std::tuple<std::string, std::string, int>>& pairs)
      const {
    PairEval e = evaluate_pairs(model_, build_pairs(pairs));
    py::dict d;
    d["accuracy"] = e.accuracy;
    d["auc"] = e.auc_on_delta;
    return d;
  }

  std::vector<std::pair<std::size_t, double>> rank_pairs(
      const std::vector<std::tuple<std::string, std::string, int>>& pairs,
      int n_samples, double rate, std::uint64_t seed) const {
    auto ranked = rank_by_uncertainty(model_, build_pairs(pairs), n_samples,
                                      rate, seed);
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& u : ranked) out.emplace_back(u.pair_index, u.variance);
    return out;
  }

 private:
  static py::list history_to_list(const TrainHistory& h) {
    py::list out;
    for (const EpochRecord& r : h.records) {
      py::dict d;
      d["epoch"] = r.epoch;
      d["split"] = r.split;
      d["loss"] = r.loss;
      d["accuracy"] = r.accuracy;
      out.append(d);
    }
    return out;
  }

  ScoreModel<float> model_;
};

}  // namespace

PYBIND11_MODULE(_synthrank, m) {
  m.doc() = "molecular synthesizability ranking toolkit";

  // smiles
  m.def(
      "canonical_smiles",
      [](const std::string& s) { return canonical_form(parse_checked(s)); },
      py::arg("smiles"));
  m.def(
      "strip_stereo",
      [](const std::string& s) {
        return canonical_form(strip_stereo(parse_checked(s)));
      },
      py::arg("smiles"));
  m.def(
      "heavy_atom_count",
      [](const std::string& s) { return heavy_atom_count(parse_checked(s)); },
      py::arg("smiles"));
  m.def(
      "molecule_info",
      [](const std::string& s) {
        Molecule mol = parse_checked(s);
        py::dict d;
        d["atoms"] = mol.num_atoms();
        d["bonds"] = mol.num_bonds();
        d["heavy_atoms"] = heavy_atom_count(mol);
        d["has_stereo"] = mol.has_stereo();
        int ring_bonds = 0;
        for (const Bond& b : mol.bonds) ring_bonds += b.in_ring ? 1 : 0;
        d["ring_bonds"] = ring_bonds;
        return d;
      },
      py::arg("smiles"));

  // fingerprints
  m.def(
      "morgan_fingerprint",
      [](const std::string& s, int radius, int n_bits,
         const std::string& variant) {
        Fingerprint fp = morgan_fingerprint(parse_checked(s), radius, n_bits,
                                            fp_variant_from_name(variant));
        std::map<std::uint32_t, std::uint32_t> out(fp.data.begin(),
                                                   fp.data.end());
        return out;
      },
      py::arg("smiles"), py::arg("radius") = 4, py::arg("n_bits") = 2048,
      py::arg("variant") = "counts");
  m.def(
      "tanimoto",
      [](const std::string& a, const std::string& b, int radius, int n_bits,
         const std::string& variant) {
        FpVariant v = fp_variant_from_name(variant);
        return tanimoto_similarity(
            morgan_fingerprint(parse_checked(a), radius, n_bits, v),
            morgan_fingerprint(parse_checked(b), radius, n_bits, v));
      },
      py::arg("smiles_a"), py::arg("smiles_b"), py::arg("radius") = 4,
      py::arg("n_bits") = 2048, py::arg("variant") = "counts");

  // graph featurization
  m.def(
      "feature_shapes",
      [](const std::string& s, int max_level) {
        GraphBundle b = build_bundle(parse_checked(s), max_level);
        py::list out;
        for (const FeatureGraph& g : b.levels) {
          py::dict d;
          d["level"] = g.level;
          d["nodes"] = g.n_nodes;
          d["edges"] = g.n_edges();
          d["node_width"] = g.node_width;
          d["edge_width"] = g.edge_width;
          out.append(d);
        }
        return out;
      },
      py::arg("smiles"), py::arg("max_level") = 2);

  // metrics
  m.def(
      "auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return auc(scores, labels);
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "pcc",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return pcc(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "binary_metrics",
      [](long long tp, long long tn, long long fp, long long fn) {
        BinaryMetrics b = binary_metrics({tp, tn, fp, fn});
        py::dict d;
        d["accuracy"] = b.accuracy ? py::cast(*b.accuracy) : py::none();
        d["sensitivity"] =
            b.sensitivity ? py::cast(*b.sensitivity) : py::none();
        d["specificity"] =
            b.specificity ? py::cast(*b.specificity) : py::none();
        return d;
      },
      py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"));

  // loss and rewards
  m.def(
      "pairwise_loss",
      [](double si, double sj, int y, double lam) {
        return pairwise_loss(si, sj, y, LossConfig{lam});
      },
      py::arg("score_i"), py::arg("score_j"), py::arg("label"),
      py::arg("lambda_") = 1e-4);
  m.def(
      "sigmoid_reward",
      [](double x, double a, double b, double k) {
        return sigmoid_reward(x, SigmoidTransform{a, b, k});
      },
      py::arg("x"), py::arg("a"), py::arg("b"), py::arg("k") = 0.25);
  m.def(
      "double_sigmoid_reward",
      [](double x, double a, double b, double c_se, double c_si,
         double c_div) {
        return double_sigmoid_reward(
            x, DoubleSigmoidTransform{a, b, c_se, c_si, c_div});
      },
      py::arg("x"), py::arg("a") = 0.0, py::arg("b") = 500.0,
      py::arg("c_se") = 500.0, py::arg("c_si") = 500.0,
      py::arg("c_div") = 250.0);

  // clustering
  m.def(
      "kmeans_assignments",
      [](const std::vector<std::string>& smiles, int k, std::uint64_t seed) {
        std::vector<Fingerprint> fps;
        for (const auto& s : smiles) {
          fps.push_back(morgan_fingerprint(parse_checked(s)));
        }
        return kmeans_tanimoto(fps, k, seed).assignment;
      },
      py::arg("smiles"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "select_k",
      [](const std::vector<std::string>& smiles, std::size_t budget,
         std::uint64_t seed, bool literal_minimum) {
        std::vector<Fingerprint> fps;
        for (const auto& s : smiles) {
          fps.push_back(morgan_fingerprint(parse_checked(s)));
        }
        ClusterConfig cfg = ClusterConfig::for_budget(budget, seed);
        cfg.k_min = std::min<int>(cfg.k_min,
                                  static_cast<int>(fps.size()) - 1);
        return select_k_silhouette(fps, cfg, literal_minimum);
      },
      py::arg("smiles"), py::arg("budget"), py::arg("seed") = 0,
      py::arg("literal_minimum") = false);

  // model
  py::class_<PyModel>(m, "Model")
      .def_static("create", &PyModel::create, py::arg("architecture") = "gglggl",
                  py::arg("hidden") = 128, py::arg("heads") = 8,
                  py::arg("head_hidden") = 256, py::arg("dropout") = 0.2,
                  py::arg("fp_bits") = 2048, py::arg("fp_variant") = "counts",
                  py::arg("seed") = 0)
      .def_static("load", &PyModel::load, py::arg("checkpoint_dir"))
      .def("save", &PyModel::save, py::arg("checkpoint_dir"))
      .def("score", &PyModel::score, py::arg("smiles"))
      .def("score_many", &PyModel::score_many, py::arg("smiles"))
      .def("pair_delta", &PyModel::pair_delta, py::arg("smiles_a"),
           py::arg("smiles_b"))
      .def("config", &PyModel::config)
      .def("evaluate", &PyModel::evaluate, py::arg("pairs"))
      .def("rank_pairs", &PyModel::rank_pairs, py::arg("pairs"),
           py::arg("n_samples") = 100, py::arg("rate") = 0.2,
           py::arg("seed") = 0)
      .def("pretrain", &PyModel::pretrain_pairs, py::arg("pairs"),
           py::arg("chunks") = 25, py::arg("epochs_per_chunk") = 10,
           py::arg("batch") = 128, py::arg("lr") = 3e-4,
           py::arg("lambda_") = 1e-4, py::arg("seed") = 0)
      .def("finetune", &PyModel::finetune_pairs, py::arg("pairs"),
           py::arg("holdout") = std::vector<std::tuple<std::string,
                                                       std::string, int>>{},
           py::arg("batch") = 4, py::arg("lr") = -1.0,
           py::arg("max_epochs") = 20, py::arg("use_validation") = true,
           py::arg("seed") = 0);
}
