//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/model.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace synthrank {

namespace fs = std::filesystem;
using nlohmann::json;

const char* architecture_name(Architecture a) {
  switch (a) {
    case Architecture::kGGLGGL: return "gglggl";
    case Architecture::kGGG: return "ggg";
    case Architecture::kFpMlp: return "fp-mlp";
  }
  return "gglggl";
}

Architecture architecture_from_name(const std::string& name) {
  if (name == "gglggl") return Architecture::kGGLGGL;
  if (name == "ggg") return Architecture::kGGG;
  if (name == "fp-mlp" || name == "fp") return Architecture::kFpMlp;
  throw ValueError("unknown architecture: " + name);
}

void ModelConfig::validate() const {
  if (hidden_dim <= 0 || head_hidden <= 0 || head_layers <= 0) {
    throw ValueError("model dimensions must be positive");
  }
  if (heads <= 0 || hidden_dim % heads != 0) {
    throw ValueError("hidden_dim must be divisible by heads");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ValueError("dropout_rate must lie in [0,1)");
  }
  if (architecture == Architecture::kFpMlp) {
    if (fp_bits <= 0 || fp_embed_dim <= 0) {
      throw ValueError("fingerprint dimensions must be positive");
    }
  } else if (node_width <= 0 || edge_width < 0) {
    throw ValueError("feature widths must be positive");
  }
}

namespace {

void push_gat(std::vector<ParamSpec>& out, const std::string& prefix,
              int in_dim, int hidden, int heads) {
  int per_head = hidden / heads;
  out.push_back({prefix + ".Wi", in_dim, hidden});
  out.push_back({prefix + ".bi", 1, hidden, ParamInit::kZero});
  out.push_back({prefix + ".Wj", in_dim, hidden});
  out.push_back({prefix + ".bj", 1, hidden, ParamInit::kZero});
  out.push_back({prefix + ".att", 2 * per_head, heads});
  out.push_back({prefix + ".prelu", 1, 1, ParamInit::kPreluSlope});
  out.push_back({prefix + ".out_bias", 1, hidden, ParamInit::kZero});
}

void push_line_layer(std::vector<ParamSpec>& out, const std::string& prefix,
                  int hidden, int edge_width, bool with_edges) {
  out.push_back({prefix + ".W_lift", hidden, hidden});
  out.push_back({prefix + ".b_lift", 1, hidden, ParamInit::kZero});
  if (with_edges) {
    out.push_back({prefix + ".W_edge", edge_width, hidden});
  }
  out.push_back({prefix + ".Wi", hidden, hidden});
  out.push_back({prefix + ".bi", 1, hidden, ParamInit::kZero});
  out.push_back({prefix + ".Wj", hidden, hidden});
  out.push_back({prefix + ".bj", 1, hidden, ParamInit::kZero});
  out.push_back({prefix + ".att", 2 * hidden, 1});
  out.push_back({prefix + ".out_bias", 1, hidden, ParamInit::kZero});
}

void push_gate(std::vector<ParamSpec>& out, const std::string& prefix,
               int hidden) {
  out.push_back({prefix + ".W", hidden, 1});
  out.push_back({prefix + ".b", 1, 1, ParamInit::kZero});
}

void push_mlp(std::vector<ParamSpec>& out, int in_dim, int hidden,
              int n_hidden) {
  int d = in_dim;
  for (int l = 0; l < n_hidden; ++l) {
    out.push_back({"mlp.W" + std::to_string(l + 1), d, hidden});
    out.push_back({"mlp.b" + std::to_string(l + 1), 1, hidden,
                   ParamInit::kZero});
    d = hidden;
  }
  out.push_back({"mlp.Wout", d, 1});
  out.push_back({"mlp.bout", 1, 1, ParamInit::kZero});
}

}  // namespace

std::vector<ParamSpec> param_layout(const ModelConfig& cfg) {
  cfg.validate();
  std::vector<ParamSpec> out;
  switch (cfg.architecture) {
    case Architecture::kGGLGGL: {
      push_gat(out, "g1", cfg.node_width, cfg.hidden_dim, cfg.heads);
      push_gate(out, "gate1", cfg.hidden_dim);
      push_gat(out, "g2", cfg.hidden_dim, cfg.hidden_dim, cfg.heads);
      push_gate(out, "gate2", cfg.hidden_dim);
      push_line_layer(out, "l1", cfg.hidden_dim, cfg.edge_width, true);
      push_gate(out, "gate3", cfg.hidden_dim);
      push_gat(out, "g3", cfg.hidden_dim, cfg.hidden_dim, cfg.heads);
      push_gate(out, "gate4", cfg.hidden_dim);
      push_gat(out, "g4", cfg.hidden_dim, cfg.hidden_dim, cfg.heads);
      push_gate(out, "gate5", cfg.hidden_dim);
      push_line_layer(out, "l2", cfg.hidden_dim, cfg.edge_width, false);
      push_gate(out, "gate6", cfg.hidden_dim);
      push_mlp(out, cfg.readout_width(), cfg.head_hidden, cfg.head_layers);
      break;
    }
    case Architecture::kGGG: {
      push_gat(out, "g1", cfg.node_width, cfg.hidden_dim, cfg.heads);
      push_gate(out, "gate1", cfg.hidden_dim);
      push_gat(out, "g2", cfg.hidden_dim, cfg.hidden_dim, cfg.heads);
      push_gate(out, "gate2", cfg.hidden_dim);
      push_gat(out, "g3", cfg.hidden_dim, cfg.hidden_dim, cfg.heads);
      push_gate(out, "gate3", cfg.hidden_dim);
      push_mlp(out, cfg.readout_width(), cfg.head_hidden, cfg.head_layers);
      break;
    }
    case Architecture::kFpMlp: {
      out.push_back({"embed.W", cfg.fp_bits, cfg.fp_embed_dim});
      out.push_back({"embed.b", 1, cfg.fp_embed_dim, ParamInit::kZero});
      push_mlp(out, cfg.fp_embed_dim, cfg.head_hidden, cfg.head_layers);
      break;
    }
  }
  return out;
}

ModelInput make_model_input(const Molecule& mol, const ModelConfig& cfg) {
  ModelInput in;
  if (cfg.is_graph()) {
    int depth = cfg.architecture == Architecture::kGGLGGL ? 2 : 0;
    in.bundle = build_bundle(mol, depth);
    in.has_bundle = true;
  } else {
    in.fingerprint =
        morgan_fingerprint(mol, cfg.fp_radius, cfg.fp_bits, cfg.fp_variant);
    in.has_fingerprint = true;
  }
  return in;
}

// ---------------------------------------------------------------------------
// Checkpoints: <dir>/meta.json + <dir>/weights.bin. weights.bin is
//   "SRWB" | u32 version | u32 n_tensors | { u32 rank, u64 rows, u64 cols,
//   f32 data[rows*cols] }*
// little-endian throughout.

namespace {

constexpr char kMagic[4] = {'S', 'R', 'W', 'B'};
constexpr std::uint32_t kFormatVersion = 1;

json config_to_json(const ModelConfig& c) {
  return json{{"architecture", architecture_name(c.architecture)},
              {"hidden_dim", c.hidden_dim},
              {"heads", c.heads},
              {"head_hidden", c.head_hidden},
              {"head_layers", c.head_layers},
              {"fp_embed_dim", c.fp_embed_dim},
              {"dropout_rate", c.dropout_rate},
              {"node_width", c.node_width},
              {"edge_width", c.edge_width},
              {"fp_bits", c.fp_bits},
              {"fp_radius", c.fp_radius},
              {"fp_variant", fp_variant_name(c.fp_variant)},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.architecture = architecture_from_name(j.at("architecture"));
  c.hidden_dim = j.at("hidden_dim");
  c.heads = j.at("heads");
  c.head_hidden = j.at("head_hidden");
  c.head_layers = j.at("head_layers");
  c.fp_embed_dim = j.at("fp_embed_dim");
  c.dropout_rate = j.at("dropout_rate");
  c.node_width = j.at("node_width");
  c.edge_width = j.at("edge_width");
  c.fp_bits = j.at("fp_bits");
  c.fp_radius = j.at("fp_radius");
  c.fp_variant = fp_variant_from_name(j.at("fp_variant"));
  c.seed = j.at("seed");
  return c;
}

template <typename V>
void write_raw(std::ofstream& os, const V& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V read_raw(std::ifstream& is) {
  V v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(V));
  if (!is) throw CheckpointError("truncated weights file");
  return v;
}

}  // namespace

void save_checkpoint(const ScoreModel<float>& model, const std::string& dir,
                     const std::string& provenance) {
  fs::create_directories(dir);
  json meta{{"format_version", kFormatVersion},
            {"model", config_to_json(model.config)}};
  if (!provenance.empty()) meta["provenance"] = provenance;
  {
    std::ofstream os(fs::path(dir) / "meta.json");
    if (!os) throw IoError("cannot write " + dir + "/meta.json");
    os << meta.dump(2) << "\n";
  }
  std::ofstream os(fs::path(dir) / "weights.bin", std::ios::binary);
  if (!os) throw IoError("cannot write " + dir + "/weights.bin");
  os.write(kMagic, 4);
  write_raw(os, kFormatVersion);
  write_raw(os, static_cast<std::uint32_t>(model.params.size()));
  for (const auto& p : model.params) {
    write_raw(os, static_cast<std::uint32_t>(2));
    write_raw(os, static_cast<std::uint64_t>(p.rows));
    write_raw(os, static_cast<std::uint64_t>(p.cols));
    os.write(reinterpret_cast<const char*>(p.data.data()),
             static_cast<std::streamsize>(p.data.size() * sizeof(float)));
  }
  if (!os) throw IoError("failed writing weights to " + dir);
}

ScoreModel<float> load_checkpoint(const std::string& dir) {
  std::ifstream meta_in(fs::path(dir) / "meta.json");
  if (!meta_in) throw CheckpointError("missing meta.json in " + dir);
  json meta;
  try {
    meta_in >> meta;
  } catch (const json::exception& e) {
    throw CheckpointError("malformed meta.json: " + std::string(e.what()));
  }
  if (meta.value("format_version", 0u) != kFormatVersion) {
    throw CheckpointError("unsupported checkpoint format version");
  }
  ModelConfig cfg;
  try {
    cfg = config_from_json(meta.at("model"));
  } catch (const json::exception& e) {
    throw CheckpointError("meta.json misses model fields: " +
                          std::string(e.what()));
  }

  ScoreModel<float> model;
  model.config = cfg;
  auto layout = param_layout(cfg);

  std::ifstream is(fs::path(dir) / "weights.bin", std::ios::binary);
  if (!is) throw CheckpointError("missing weights.bin in " + dir);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError("bad magic bytes in weights.bin");
  }
  if (read_raw<std::uint32_t>(is) != kFormatVersion) {
    throw CheckpointError("unsupported weights format version");
  }
  auto count = read_raw<std::uint32_t>(is);
  if (count != layout.size()) {
    throw CheckpointError("checkpoint does not match the declared config: " +
                          std::to_string(count) + " tensors, expected " +
                          std::to_string(layout.size()));
  }
  for (const ParamSpec& spec : layout) {
    if (read_raw<std::uint32_t>(is) != 2) {
      throw CheckpointError("unexpected tensor rank for " + spec.name);
    }
    auto rows = read_raw<std::uint64_t>(is);
    auto cols = read_raw<std::uint64_t>(is);
    if (rows != static_cast<std::uint64_t>(spec.rows) ||
        cols != static_cast<std::uint64_t>(spec.cols)) {
      throw CheckpointError("shape mismatch for " + spec.name);
    }
    Tensor<float> t(spec.rows, spec.cols);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!is) throw CheckpointError("truncated weights file at " + spec.name);
    model.params.push_back(std::move(t));
  }
  return model;
}

}  // namespace synthrank
