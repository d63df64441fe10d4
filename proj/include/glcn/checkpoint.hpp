#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "glcn/errors.hpp"
#include "glcn/model.hpp"

// Checkpoint layout (JSON, one document):
//
//   {
//     "format": "glcn-checkpoint/1",
//     "model":  { "kind": "glcn" | "gcn", "input_dim", "hidden": [...], "classes",
//                 "lambda", "graph": { "use_projection", "embed_dim", "gamma",
//                 "beta", "prior_mode" } },            // lambda/graph: glcn only
//     "params": [ { "name", "rows", "cols", "values": [row-major doubles] }, ... ],
//     "run":    { ...effective run configuration, opaque to this header... }
//   }
//
// Doubles are written in shortest round-trip form, so a save/load cycle is
// lossless. The GCN adjacency is not stored; it is rebuilt from the dataset.

namespace glcn {

inline constexpr std::string_view kCheckpointFormat = "glcn-checkpoint/1";

struct Checkpoint {
  std::string kind;  ///< "glcn" or "gcn"
  std::optional<GlcnModel> glcn;
  std::optional<GcnModel> gcn;
  nlohmann::json run;
};

namespace detail {

inline nlohmann::json params_json(const std::vector<const Parameter*>& ps) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Parameter* p : ps) {
    arr.push_back({{"name", p->name},
                   {"rows", p->value.rows()},
                   {"cols", p->value.cols()},
                   {"values", std::vector<double>(p->value.values().begin(), p->value.values().end())}});
  }
  return arr;
}

inline std::vector<std::size_t> hidden_widths(const std::vector<GraphConvLayer>& conv) {
  std::vector<std::size_t> h;
  for (const auto& l : conv) h.push_back(l.weight.value.cols());
  return h;
}

inline void fill_params(const nlohmann::json& arr, const std::vector<Parameter*>& ps) {
  if (!arr.is_array() || arr.size() != ps.size()) {
    throw LoadError("checkpoint holds " + std::to_string(arr.size()) + " parameters, model expects " +
                    std::to_string(ps.size()));
  }
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto& e = arr[k];
    const auto name = e.at("name").get<std::string>();
    if (name != ps[k]->name) throw LoadError("checkpoint parameter '" + name + "' where '" + ps[k]->name + "' expected");
    const auto rows = e.at("rows").get<std::size_t>();
    const auto cols = e.at("cols").get<std::size_t>();
    if (rows != ps[k]->value.rows() || cols != ps[k]->value.cols()) {
      throw LoadError("checkpoint parameter '" + name + "' has shape " + Matrix::shape_string(rows, cols) +
                      ", model expects " + ps[k]->value.shape());
    }
    ps[k]->value = Matrix(rows, cols, e.at("values").get<std::vector<double>>());
  }
}

}  // namespace detail

inline nlohmann::json checkpoint_json(const GlcnModel& m, nlohmann::json run = nlohmann::json::object()) {
  nlohmann::json model = {
      {"kind", "glcn"},
      {"input_dim", m.input_dim()},
      {"hidden", detail::hidden_widths(m.conv)},
      {"classes", m.classes()},
      {"lambda", m.lambda},
      {"graph",
       {{"use_projection", m.graph_cfg.use_projection},
        {"embed_dim", m.graph_cfg.embed_dim},
        {"gamma", m.graph_cfg.gamma},
        {"beta", m.graph_cfg.beta},
        {"prior_mode", std::string(to_string(m.graph_cfg.prior_mode))}}}};
  return {{"format", kCheckpointFormat}, {"model", model}, {"params", detail::params_json(m.parameters())},
          {"run", std::move(run)}};
}

inline nlohmann::json checkpoint_json(const GcnModel& m, nlohmann::json run = nlohmann::json::object()) {
  nlohmann::json model = {{"kind", "gcn"},
                          {"input_dim", m.input_dim()},
                          {"hidden", detail::hidden_widths(m.conv)},
                          {"classes", m.classes()}};
  return {{"format", kCheckpointFormat}, {"model", model}, {"params", detail::params_json(m.parameters())},
          {"run", std::move(run)}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string{}) != kCheckpointFormat) {
      throw LoadError("unsupported checkpoint format '" + j.value("format", std::string{}) + "'");
    }
    const auto& m = j.at("model");
    Checkpoint c;
    c.kind = m.at("kind").get<std::string>();
    c.run = j.value("run", nlohmann::json::object());
    const auto input_dim = m.at("input_dim").get<std::size_t>();
    const auto hidden = m.at("hidden").get<std::vector<std::size_t>>();
    const auto classes = m.at("classes").get<std::size_t>();
    Rng dummy(0);  // shapes only; values are overwritten below
    if (c.kind == "glcn") {
      const auto& g = m.at("graph");
      GraphLearnConfig cfg;
      cfg.use_projection = g.at("use_projection").get<bool>();
      cfg.embed_dim = g.at("embed_dim").get<std::size_t>();
      cfg.gamma = g.at("gamma").get<double>();
      cfg.beta = g.at("beta").get<double>();
      cfg.prior_mode = parse_prior_mode(g.at("prior_mode").get<std::string>());
      GlcnModel model = GlcnModel::create(input_dim, hidden, classes, cfg, m.at("lambda").get<double>(), dummy);
      detail::fill_params(j.at("params"), model.parameters());
      model.validate();
      c.glcn = std::move(model);
    } else if (c.kind == "gcn") {
      GcnModel model = GcnModel::create(input_dim, hidden, classes, {}, dummy);
      detail::fill_params(j.at("params"), model.parameters());
      model.validate();
      c.gcn = std::move(model);
    } else {
      throw LoadError("unknown model kind '" + c.kind + "' in checkpoint");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << j.dump() << '\n';
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace glcn
