//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_MODEL_HPP
#define SYNTHRANK_MODEL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "synthrank/autodiff.hpp"
#include "synthrank/fingerprint.hpp"
#include "synthrank/molgraph.hpp"

namespace synthrank {

enum class Architecture { kGGLGGL, kGGG, kFpMlp };

const char* architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

struct ModelConfig {
  Architecture architecture = Architecture::kGGLGGL;
  int hidden_dim = 128;
  int heads = 8;
  int head_hidden = 256;
  int head_layers = 3;
  int fp_embed_dim = 256;
  double dropout_rate = 0.2;
  int node_width = kNodeFeatureWidth;
  int edge_width = kEdgeFeatureWidth;
  int fp_bits = 2048;
  int fp_radius = 4;
  FpVariant fp_variant = FpVariant::kCounts;
  std::uint64_t seed = 0;

  bool is_graph() const { return architecture != Architecture::kFpMlp; }
  int readout_width() const { return 2 * hidden_dim; }
  void validate() const;
};

// One entry per parameter tensor, in the order they are stored, saved and
// optimized. The layout is a pure function of the config.
enum class ParamInit { kGlorot, kZero, kPreluSlope };

struct ParamSpec {
  std::string name;
  std::int64_t rows;
  std::int64_t cols;
  ParamInit init = ParamInit::kGlorot;
};

std::vector<ParamSpec> param_layout(const ModelConfig& cfg);

template <typename T>
struct ScoreModel {
  ModelConfig config;
  std::vector<Tensor<T>> params;

  template <typename U>
  ScoreModel<U> cast() const {
    ScoreModel<U> out;
    out.config = config;
    out.params.reserve(params.size());
    for (const auto& p : params) out.params.push_back(p.template cast<U>());
    return out;
  }
};

// Glorot-uniform weights, zero biases, PReLU slopes at 0.25, all drawn from
// the config seed.
template <typename T>
ScoreModel<T> init_model(const ModelConfig& cfg) {
  cfg.validate();
  ScoreModel<T> model;
  model.config = cfg;
  auto layout = param_layout(cfg);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const ParamSpec& spec = layout[i];
    Tensor<T> t(spec.rows, spec.cols);
    if (spec.init == ParamInit::kPreluSlope) {
      t.data.assign(t.data.size(), T(0.25));
    } else if (spec.init == ParamInit::kGlorot) {
      RngStream rng(cfg.seed, 0x9000 + i);
      double limit = std::sqrt(6.0 / static_cast<double>(spec.rows + spec.cols));
      for (auto& v : t.data) v = static_cast<T>(rng.uniform(-limit, limit));
    }
    model.params.push_back(std::move(t));
  }
  return model;
}

// What a model consumes for one molecule: the graph bundle for the GNN
// variants, the fingerprint for FP-MLP.
struct ModelInput {
  GraphBundle bundle;
  Fingerprint fingerprint;
  bool has_bundle = false;
  bool has_fingerprint = false;
};

ModelInput make_model_input(const Molecule& mol, const ModelConfig& cfg);

enum class ForwardMode { kTrain, kEval, kMcDropout };

namespace detail {

// Directed edges (both directions of every undirected edge, plus one self
// loop per node), sorted by destination so destination ids are the softmax
// segments.
struct AdjacencyPlan {
  std::vector<int> src;
  std::vector<int> dst;
  int n_nodes = 0;
};

inline AdjacencyPlan adjacency_plan(const FeatureGraph& g) {
  AdjacencyPlan plan;
  plan.n_nodes = g.n_nodes;
  std::vector<std::pair<int, int>> directed;  // (dst, src)
  directed.reserve(g.edges.size() * 2 + g.n_nodes);
  for (auto [u, v] : g.edges) {
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  for (int i = 0; i < g.n_nodes; ++i) directed.emplace_back(i, i);
  std::sort(directed.begin(), directed.end());
  for (auto& [d, s] : directed) {
    plan.dst.push_back(d);
    plan.src.push_back(s);
  }
  return plan;
}

template <typename T>
struct ParamCursor {
  const std::vector<int>* ids;
  std::size_t next = 0;
  int take() { return (*ids)[next++]; }
};

// e(h_i, h_j) = a^T LeakyReLU(W_i h_i || W_j h_j) over directed pairs,
// softmax over incoming edges per node, then the attention-weighted sum of
// W_j h_j per head; heads concatenated, bias added, PReLU.
template <typename T>
int gatv2_layer(Tape<T>& tape, ParamCursor<T>& cur, const AdjacencyPlan& adj,
                int h, int heads, int per_head) {
  int Wi = cur.take(), bi = cur.take(), Wj = cur.take(), bj = cur.take();
  int att = cur.take(), prelu_slope = cur.take(), out_bias = cur.take();

  int hi = tape.add(tape.matmul(h, Wi), bi);
  int hj = tape.add(tape.matmul(h, Wj), bj);
  int gi = tape.row_gather(hi, adj.dst);
  int gj = tape.row_gather(hj, adj.src);

  int agg = -1;
  for (int k = 0; k < heads; ++k) {
    int gik = tape.col_slice(gi, k * per_head, (k + 1) * per_head);
    int gjk = tape.col_slice(gj, k * per_head, (k + 1) * per_head);
    int cat = tape.concat_cols(gik, gjk);
    int act = tape.leaky_relu(cat, T(0.2));
    int e = tape.matmul(act, tape.col_slice(att, k, k + 1));
    int alpha = tape.segment_softmax(e, adj.dst, adj.n_nodes);
    int msg = tape.scale_rows(gjk, alpha);
    int aggk = tape.segment_sum(msg, adj.dst, adj.n_nodes);
    agg = (agg < 0) ? aggk : tape.concat_cols(agg, aggk);
  }
  return tape.prelu(tape.add(agg, out_bias), prelu_slope);
}

// Lift level-k node states onto level-k+1 nodes (sum of the two endpoint
// states, projected; raw edge features enter here at level 0), then one
// single-head attention pass over the line-graph adjacency with ELU output.
template <typename T>
int line_graph_layer(Tape<T>& tape, ParamCursor<T>& cur,
                  const FeatureGraph& lower, const FeatureGraph& upper,
                  bool with_edge_features, int edge_leaf, int h) {
  int W_lift = cur.take(), b_lift = cur.take();
  int W_edge = with_edge_features ? cur.take() : -1;
  int Wi = cur.take(), bi = cur.take(), Wj = cur.take(), bj = cur.take();
  int att = cur.take(), out_bias = cur.take();

  std::vector<int> firsts, seconds;
  firsts.reserve(lower.edges.size());
  for (auto [u, v] : lower.edges) {
    firsts.push_back(u);
    seconds.push_back(v);
  }
  int hu = tape.row_gather(h, firsts);
  int hv = tape.row_gather(h, seconds);
  int lifted = tape.add(tape.matmul(tape.add(hu, hv), W_lift), b_lift);
  if (with_edge_features) {
    lifted = tape.add(lifted, tape.matmul(edge_leaf, W_edge));
  }

  AdjacencyPlan adj = adjacency_plan(upper);
  int xi = tape.add(tape.matmul(lifted, Wi), bi);
  int xj = tape.add(tape.matmul(lifted, Wj), bj);
  int gi = tape.row_gather(xi, adj.dst);
  int gj = tape.row_gather(xj, adj.src);
  int cat = tape.concat_cols(gi, gj);
  int e = tape.matmul(tape.leaky_relu(cat, T(0.2)), att);
  int alpha = tape.segment_softmax(e, adj.dst, adj.n_nodes);
  int agg = tape.segment_sum(tape.scale_rows(gj, alpha), adj.dst, adj.n_nodes);
  return tape.elu(tape.add(agg, out_bias));
}

// concat(columnwise max over nodes, sum_i sigmoid(gate(h_i)) * h_i);
// an empty node matrix yields the zero vector.
template <typename T>
int readout(Tape<T>& tape, ParamCursor<T>& cur, int h, int n_nodes) {
  int Wg = cur.take(), bg = cur.take();
  std::vector<int> seg(static_cast<std::size_t>(n_nodes), 0);
  int mx = tape.segment_max(h, seg, 1);
  int gate = tape.sigmoid(tape.add(tape.matmul(h, Wg), bg));
  int weighted = tape.segment_sum(tape.scale_rows(h, gate), seg, 1);
  return tape.concat_cols(mx, weighted);
}

template <typename T>
int mlp_head(Tape<T>& tape, ParamCursor<T>& cur, int x, int n_hidden,
             bool use_dropout, double rate, RngStream& rng) {
  if (use_dropout) x = tape.dropout(x, rate, rng);
  for (int l = 0; l < n_hidden; ++l) {
    int W = cur.take();
    int b = cur.take();
    x = tape.relu(tape.add(tape.matmul(x, W), b));
    if (use_dropout && l + 1 < n_hidden) x = tape.dropout(x, rate, rng);
  }
  int W = cur.take();
  int b = cur.take();
  return tape.add(tape.matmul(x, W), b);
}

}  // namespace detail

// Places every parameter tensor on the tape, in layout order.
template <typename T>
std::vector<int> place_params(Tape<T>& tape, const ScoreModel<T>& model,
                              bool trainable) {
  std::vector<int> ids;
  ids.reserve(model.params.size());
  for (const auto& p : model.params) {
    ids.push_back(tape.leaf(p, trainable));
  }
  return ids;
}

// Builds the score for one molecule on the tape and returns the node id of
// the 1x1 score tensor. `param_ids` must come from place_params on the same
// tape. Dropout fires in kTrain and kMcDropout modes; `rate_override` >= 0
// replaces the configured rate (used by the MC-dropout uncertainty pass).
template <typename T>
int forward_score(Tape<T>& tape, const ScoreModel<T>& model,
                  const std::vector<int>& param_ids, const ModelInput& input,
                  ForwardMode mode, RngStream& rng,
                  double rate_override = -1.0) {
  const ModelConfig& cfg = model.config;
  double rate = rate_override >= 0.0 ? rate_override : cfg.dropout_rate;
  bool use_dropout = (mode != ForwardMode::kEval) && rate > 0.0;
  detail::ParamCursor<T> cur{&param_ids};

  if (cfg.architecture == Architecture::kFpMlp) {
    if (!input.has_fingerprint) {
      throw ValueError(
          "model/input mismatch: this checkpoint is fingerprint-based but "
          "the input carries no fingerprint");
    }
    const Fingerprint& fp = input.fingerprint;
    if (fp.n_bits != cfg.fp_bits) {
      throw ValueError("fingerprint width does not match the model");
    }
    Tensor<T> dense(1, cfg.fp_bits);
    for (auto& [pos, count] : fp.data) {
      dense.at(0, pos) = static_cast<T>(count);
    }
    int x = tape.leaf(std::move(dense));
    int We = cur.take();
    int be = cur.take();
    int emb = tape.relu(tape.add(tape.matmul(x, We), be));
    return detail::mlp_head(tape, cur, emb, cfg.head_layers, use_dropout,
                            rate, rng);
  }

  if (!input.has_bundle) {
    throw ValueError(
        "model/input mismatch: this checkpoint is graph-based but the input "
        "carries no graph bundle");
  }
  const GraphBundle& bundle = input.bundle;
  int depth = cfg.architecture == Architecture::kGGLGGL ? 2 : 0;
  if (static_cast<int>(bundle.levels.size()) < depth + 1) {
    throw ValueError("graph bundle is too shallow for this architecture");
  }
  if (bundle.levels[0].node_width != cfg.node_width) {
    throw ValueError("node feature width does not match the model");
  }

  Tensor<T> h0(bundle.levels[0].n_nodes, cfg.node_width);
  h0.data.assign(bundle.levels[0].node_features.begin(),
                 bundle.levels[0].node_features.end());
  int h = tape.leaf(std::move(h0));

  int edge_leaf = -1;
  if (cfg.architecture == Architecture::kGGLGGL) {
    Tensor<T> ef(bundle.levels[0].n_edges(), cfg.edge_width);
    ef.data.assign(bundle.levels[0].edge_features.begin(),
                   bundle.levels[0].edge_features.end());
    edge_leaf = tape.leaf(std::move(ef));
  }

  int readout_sum = -1;
  auto add_readout = [&](int state, int n_nodes) {
    int r = detail::readout(tape, cur, state, n_nodes);
    readout_sum = readout_sum < 0 ? r : tape.add(readout_sum, r);
  };

  if (cfg.architecture == Architecture::kGGG) {
    detail::AdjacencyPlan adj = detail::adjacency_plan(bundle.levels[0]);
    for (int l = 0; l < 3; ++l) {
      h = detail::gatv2_layer(tape, cur, adj, h, cfg.heads,
                              cfg.hidden_dim / cfg.heads);
      add_readout(h, adj.n_nodes);
    }
  } else {
    detail::AdjacencyPlan adj0 = detail::adjacency_plan(bundle.levels[0]);
    detail::AdjacencyPlan adj1 = detail::adjacency_plan(bundle.levels[1]);
    int per_head = cfg.hidden_dim / cfg.heads;

    h = detail::gatv2_layer(tape, cur, adj0, h, cfg.heads, per_head);
    add_readout(h, adj0.n_nodes);
    h = detail::gatv2_layer(tape, cur, adj0, h, cfg.heads, per_head);
    add_readout(h, adj0.n_nodes);
    h = detail::line_graph_layer(tape, cur, bundle.levels[0], bundle.levels[1],
                              true, edge_leaf, h);
    add_readout(h, adj1.n_nodes);
    h = detail::gatv2_layer(tape, cur, adj1, h, cfg.heads, per_head);
    add_readout(h, adj1.n_nodes);
    h = detail::gatv2_layer(tape, cur, adj1, h, cfg.heads, per_head);
    add_readout(h, adj1.n_nodes);
    h = detail::line_graph_layer(tape, cur, bundle.levels[1], bundle.levels[2],
                              false, -1, h);
    add_readout(h, bundle.levels[2].n_nodes);
  }

  return detail::mlp_head(tape, cur, readout_sum, cfg.head_layers,
                          use_dropout, rate, rng);
}

// Eval-mode convenience: one molecule, fresh tape, no gradients.
template <typename T>
double score_value(const ScoreModel<T>& model, const ModelInput& input) {
  Tape<T> tape;
  std::vector<int> ids = place_params(tape, model, false);
  RngStream rng(0);
  int s = forward_score(tape, model, ids, input, ForwardMode::kEval, rng);
  return static_cast<double>(tape.value(s).data[0]);
}

// Checkpoint I/O (32-bit weights; a directory with meta.json + weights.bin).
void save_checkpoint(const ScoreModel<float>& model, const std::string& dir,
                     const std::string& provenance = "");
ScoreModel<float> load_checkpoint(const std::string& dir);

}  // namespace synthrank

#endif
