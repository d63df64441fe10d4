#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glcn/checkpoint.hpp"
#include "glcn/data.hpp"
#include "glcn/errors.hpp"
#include "glcn/gconv.hpp"
#include "glcn/graph_learning.hpp"
#include "glcn/model.hpp"
#include "glcn/train.hpp"

// Experiment driver behind the command-line tool: configuration, dataset
// preparation, multi-seed training, sweeps and exports.

namespace glcn {

/// Where the prior adjacency comes from. `automatic` picks the dataset graph
/// when present and a k-NN graph otherwise.
enum class PriorSource { automatic, none, dataset, knn };

inline std::string to_string(PriorSource s) {
  switch (s) {
    case PriorSource::automatic: return "auto";
    case PriorSource::none: return "none";
    case PriorSource::dataset: return "dataset";
    case PriorSource::knn: return "knn";
  }
  return "auto";
}

inline PriorSource parse_prior_source(const std::string& s) {
  if (s == "auto") return PriorSource::automatic;
  if (s == "none") return PriorSource::none;
  if (s == "dataset") return PriorSource::dataset;
  if (s == "knn") return PriorSource::knn;
  throw ConfigError("unknown prior source '" + s + "' (expected auto|none|dataset|knn)");
}

struct RunConfig {
  std::string model = "glcn";  ///< glcn | gcn

  std::string dataset_dir;
  bool graph_free = false;
  bool row_normalize = false;
  std::optional<SynthSpec> synth;

  PriorSource prior = PriorSource::automatic;
  std::size_t knn_k = 10;
  std::optional<double> knn_sigma;

  SplitSpec splits{.labels_per_class = 20, .total_labeled = std::nullopt, .val_count = 300, .test_count = 1000};
  TrainConfig train;
  GraphLearnConfig graph{.prior_mode = PriorMode::mask};
  double lambda = 0.01;
  std::vector<std::size_t> hidden{70, 70};
  std::vector<std::uint64_t> seeds{0};

  std::string output_dir;
  int jobs = 1;
  std::optional<double> export_graph_threshold;

  void validate() const {
    if (model != "glcn" && model != "gcn") throw ConfigError("model must be 'glcn' or 'gcn', got '" + model + "'");
    if (dataset_dir.empty() == !synth.has_value()) throw ConfigError("exactly one of data.dir or data.synth must be set");
    if (hidden.empty()) throw ConfigError("hidden must list at least one convolution layer width");
    for (std::size_t k = 0; k < hidden.size(); ++k)
      if (hidden[k] == 0) throw ConfigError("hidden[" + std::to_string(k) + "] is zero; every layer width must be >= 1");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (prior == PriorSource::knn && knn_k == 0) throw ConfigError("prior.k must be >= 1");
    if (knn_sigma && !(*knn_sigma > 0.0)) throw ConfigError("prior.sigma must be > 0");
    if (model == "gcn" && prior == PriorSource::none) throw ConfigError("gcn needs a graph; prior.source cannot be 'none'");
    if (model == "glcn" && prior == PriorSource::none && graph.prior_mode != PriorMode::none) {
      throw ConfigError("graph.prior_mode needs a prior graph but prior.source is 'none'");
    }
    if (!(graph.gamma >= 0.0) || !(graph.beta >= 0.0)) throw ConfigError("graph.gamma and graph.beta must be >= 0");
    if (graph.beta > 0.0 && !uses_regularizer(graph.prior_mode)) {
      throw ConfigError("graph.beta > 0 needs prior_mode 'regularize' or 'mask+regularize'");
    }
    if (graph.use_projection && graph.embed_dim == 0) throw ConfigError("graph.embed_dim must be >= 1");
    if (export_graph_threshold && !(*export_graph_threshold >= 0.0)) throw ConfigError("export threshold must be >= 0");
    train.validate();
  }
};

namespace detail {

inline nlohmann::json opt_json(const std::optional<std::size_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

// Rejects keys outside `allowed` so typos never silently fall back to defaults.
inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw ConfigError("unknown config key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read_opt(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

}  // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json synth = nullptr;
  if (c.synth) {
    synth = {{"n_per_class", c.synth->n_per_class}, {"classes", c.synth->classes},
             {"features", c.synth->features},       {"noise", c.synth->noise_sigma},
             {"separation", c.synth->separation},   {"seed", c.synth->seed}};
  }
  return {
      {"model", c.model},
      {"data",
       {{"dir", c.dataset_dir}, {"graph_free", c.graph_free}, {"row_normalize", c.row_normalize}, {"synth", synth}}},
      {"prior", {{"source", to_string(c.prior)}, {"k", c.knn_k}, {"sigma", detail::opt_json(c.knn_sigma)}}},
      {"splits",
       {{"labels_per_class", detail::opt_json(c.splits.labels_per_class)},
        {"total_labeled", detail::opt_json(c.splits.total_labeled)},
        {"val", c.splits.val_count},
        {"test", detail::opt_json(c.splits.test_count)}}},
      {"train",
       {{"max_epochs", c.train.max_epochs},
        {"patience", c.train.patience},
        {"lr", c.train.lr},
        {"monitor", c.train.monitor == Monitor::ce ? "ce" : "total"}}},
      {"graph",
       {{"use_projection", c.graph.use_projection},
        {"embed_dim", c.graph.embed_dim},
        {"gamma", c.graph.gamma},
        {"beta", c.graph.beta},
        {"prior_mode", std::string(to_string(c.graph.prior_mode))}}},
      {"lambda", c.lambda},
      {"hidden", c.hidden},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir},
      {"jobs", c.jobs},
      {"export_graph_threshold", detail::opt_json(c.export_graph_threshold)}};
}

/// Parses a (possibly partial) config document over the defaults. Unknown
/// keys are rejected. The result is validated.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    detail::check_keys(j,
                       {"model", "data", "prior", "splits", "train", "graph", "lambda", "hidden", "seeds", "output_dir",
                        "jobs", "export_graph_threshold"},
                       "");
    detail::read(j, "model", c.model);
    if (j.contains("data")) {
      const auto& d = j.at("data");
      detail::check_keys(d, {"dir", "graph_free", "row_normalize", "synth"}, "data");
      detail::read(d, "dir", c.dataset_dir);
      detail::read(d, "graph_free", c.graph_free);
      detail::read(d, "row_normalize", c.row_normalize);
      if (d.contains("synth") && !d.at("synth").is_null()) {
        const auto& s = d.at("synth");
        detail::check_keys(s, {"n_per_class", "classes", "features", "noise", "separation", "seed"}, "data.synth");
        SynthSpec spec;
        detail::read(s, "n_per_class", spec.n_per_class);
        detail::read(s, "classes", spec.classes);
        detail::read(s, "features", spec.features);
        detail::read(s, "noise", spec.noise_sigma);
        detail::read(s, "separation", spec.separation);
        detail::read(s, "seed", spec.seed);
        c.synth = spec;
      }
    }
    if (j.contains("prior")) {
      const auto& p = j.at("prior");
      detail::check_keys(p, {"source", "k", "sigma"}, "prior");
      if (p.contains("source")) c.prior = parse_prior_source(p.at("source").get<std::string>());
      detail::read(p, "k", c.knn_k);
      detail::read_opt(p, "sigma", c.knn_sigma);
    }
    if (j.contains("splits")) {
      const auto& s = j.at("splits");
      detail::check_keys(s, {"labels_per_class", "total_labeled", "val", "test"}, "splits");
      detail::read_opt(s, "labels_per_class", c.splits.labels_per_class);
      detail::read_opt(s, "total_labeled", c.splits.total_labeled);
      if (s.contains("total_labeled") && !s.at("total_labeled").is_null() && !s.contains("labels_per_class")) {
        c.splits.labels_per_class.reset();
      }
      detail::read(s, "val", c.splits.val_count);
      detail::read_opt(s, "test", c.splits.test_count);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      detail::check_keys(t, {"max_epochs", "patience", "lr", "monitor"}, "train");
      detail::read(t, "max_epochs", c.train.max_epochs);
      detail::read(t, "patience", c.train.patience);
      detail::read(t, "lr", c.train.lr);
      if (t.contains("monitor")) {
        const auto m = t.at("monitor").get<std::string>();
        if (m != "total" && m != "ce") throw ConfigError("train.monitor must be 'total' or 'ce'");
        c.train.monitor = m == "ce" ? Monitor::ce : Monitor::total;
      }
    }
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      detail::check_keys(g, {"use_projection", "embed_dim", "gamma", "beta", "prior_mode"}, "graph");
      detail::read(g, "use_projection", c.graph.use_projection);
      detail::read(g, "embed_dim", c.graph.embed_dim);
      detail::read(g, "gamma", c.graph.gamma);
      detail::read(g, "beta", c.graph.beta);
      if (g.contains("prior_mode")) c.graph.prior_mode = parse_prior_mode(g.at("prior_mode").get<std::string>());
    }
    detail::read(j, "lambda", c.lambda);
    detail::read(j, "hidden", c.hidden);
    detail::read(j, "seeds", c.seeds);
    detail::read(j, "output_dir", c.output_dir);
    detail::read(j, "jobs", c.jobs);
    detail::read_opt(j, "export_graph_threshold", c.export_graph_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  c.validate();
  return c;
}

/// Dataset (without splits) plus the prior adjacency the config asks for.
struct PreparedData {
  Dataset dataset;
  std::optional<Matrix> prior;
};

inline PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData out;
  if (cfg.synth) {
    out.dataset = synth_blobs(*cfg.synth);
  } else {
    out.dataset = load_dataset_dir(cfg.dataset_dir, cfg.graph_free);
  }
  if (cfg.row_normalize) row_normalize(out.dataset.features);

  PriorSource src = cfg.prior;
  if (src == PriorSource::automatic) src = out.dataset.adjacency ? PriorSource::dataset : PriorSource::knn;
  const bool wanted = cfg.model == "gcn" || cfg.graph.prior_mode != PriorMode::none;
  if (wanted) {
    if (src == PriorSource::dataset) {
      if (!out.dataset.adjacency) throw ConfigError("prior.source is 'dataset' but the dataset has no edges");
      out.prior = *out.dataset.adjacency;
    } else if (src == PriorSource::knn) {
      out.prior = knn_gaussian_graph(out.dataset.features, cfg.knn_k, cfg.knn_sigma);
    }
  }
  return out;
}

/// Outcome of one seed.
struct SeedRun {
  std::uint64_t seed = 0;
  TrainReport report;
  Splits splits;
  nlohmann::json checkpoint;
};

/// Splits then model initialization both draw from Rng(seed), so GLCN and
/// GCN runs with the same seed see identical splits. Splits shipped with the
/// dataset are used as-is for every seed.
inline SeedRun run_seed(const RunConfig& cfg, const PreparedData& data, std::uint64_t seed,
                        const EpochCallback& on_epoch = {}) {
  Rng rng(seed);
  Dataset ds = data.dataset.splits.train.empty() ? make_splits(data.dataset, cfg.splits, rng) : data.dataset;
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  RunConfig effective = cfg;
  effective.seeds = {seed};
  SeedRun out;
  out.seed = seed;
  out.splits = ds.splits;
  if (cfg.model == "glcn") {
    GlcnModel model = GlcnModel::create(ds.feature_dim(), cfg.hidden, ds.classes(), cfg.graph, cfg.lambda, rng);
    std::optional<GraphPrior> prior;
    if (cfg.graph.prior_mode != PriorMode::none) prior = GraphPrior::from_adjacency(*data.prior);
    out.report = train(model, ds, prior ? &*prior : nullptr, tc, on_epoch);
    out.checkpoint = checkpoint_json(model, to_json(effective));
  } else {
    GcnModel model = GcnModel::create(ds.feature_dim(), cfg.hidden, ds.classes(), normalize_adjacency(*data.prior), rng);
    out.report = train(model, ds, tc, on_epoch);
    out.checkpoint = checkpoint_json(model, to_json(effective));
  }
  return out;
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation, 0 for a single value
};

inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

/// Four decimal places.
inline std::string fmt4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

namespace detail {

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw LoadError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

// Runs every seed, `jobs` at a time; results keep seed order.
inline std::vector<SeedRun> run_seeds(const RunConfig& cfg, const PreparedData& data, std::ostream* log) {
  std::vector<SeedRun> runs(cfg.seeds.size());
  std::mutex log_mu;
  auto one = [&](std::size_t k) {
    runs[k] = run_seed(cfg, data, cfg.seeds[k]);
    if (log) {
      std::lock_guard lock(log_mu);
      const auto& r = runs[k].report;
      *log << cfg.model << " seed " << cfg.seeds[k] << ": test accuracy " << fmt4(r.test_accuracy) << " (best epoch "
           << r.best_epoch << ", stopped " << r.stopped_epoch << ", " << fmt4(r.wall_seconds) << " s)\n";
    }
  };
  const std::size_t jobs = static_cast<std::size_t>(cfg.jobs);
  for (std::size_t start = 0; start < runs.size(); start += jobs) {
    std::vector<std::future<void>> batch;
    for (std::size_t k = start; k < std::min(runs.size(), start + jobs); ++k) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, one, k));
    }
    for (auto& f : batch) f.get();
  }
  return runs;
}

inline nlohmann::json summary_json(const RunConfig& cfg, const std::vector<SeedRun>& runs) {
  std::vector<double> acc, ce;
  nlohmann::json per = nlohmann::json::array();
  for (const auto& r : runs) {
    acc.push_back(r.report.test_accuracy);
    ce.push_back(r.report.train_ce);
    per.push_back({{"seed", r.seed},
                   {"test_accuracy", r.report.test_accuracy},
                   {"train_ce", r.report.train_ce},
                   {"best_epoch", r.report.best_epoch},
                   {"stopped_epoch", r.report.stopped_epoch}});
  }
  const Summary a = summarize(acc);
  const Summary c = summarize(ce);
  return {{"model", cfg.model},
          {"runs", per},
          {"mean_test_accuracy", a.mean},
          {"std_test_accuracy", a.stddev},
          {"mean_train_ce", c.mean},
          {"table", fmt4(a.mean) + " +- " + fmt4(a.stddev)}};
}

}  // namespace detail

/// One row per entry of S above `threshold` ("edge,i,j,S_ij"), followed by n
/// audit rows ("rowsum,i,,sum_j S_ij") over the full, unthresholded S.
inline void write_graph_csv(const Matrix& s, double threshold, std::ostream& out) {
  out << "kind,i,j,value\n";
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (s(i, j) > threshold) out << "edge," << i << ',' << j << ',' << detail::format_double(s(i, j)) << '\n';
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double sum = 0.0;
    for (double v : s.row(i)) sum += v;
    out << "rowsum," << i << ",," << detail::format_double(sum) << '\n';
  }
}

/// Learned graph of a trained GLCN on its dataset.
inline Matrix learned_graph(const GlcnModel& model, const PreparedData& data) {
  if (model.input_dim() != data.dataset.feature_dim()) {
    throw DimensionError("checkpoint expects " + std::to_string(model.input_dim()) + " features, dataset has " +
                         std::to_string(data.dataset.feature_dim()));
  }
  std::optional<GraphPrior> prior;
  if (model.graph_cfg.prior_mode != PriorMode::none) {
    if (!data.prior) throw ConfigError("model was trained with a prior graph but none is available");
    if (data.prior->rows() != data.dataset.nodes()) throw DimensionError("prior does not match dataset size");
    prior = GraphPrior::from_adjacency(*data.prior);
  }
  Tape tape;
  Tensor x = tape.constant(data.dataset.features);
  return learn_graph(tape, x, prior ? &*prior : nullptr, model.graph, model.graph_cfg).graph.value();
}

/// Activations of conv layer `layer` (1-based) for every node.
inline Matrix layer_embeddings(const Checkpoint& ck, const PreparedData& data, std::size_t layer) {
  const std::size_t depth = ck.glcn ? ck.glcn->conv.size() : ck.gcn->conv.size();
  if (layer < 1 || layer > depth) {
    throw ConfigError("layer " + std::to_string(layer) + " out of range; valid layers are 1.." + std::to_string(depth));
  }
  const std::size_t input_dim = ck.glcn ? ck.glcn->input_dim() : ck.gcn->input_dim();
  if (input_dim != data.dataset.feature_dim()) {
    throw DimensionError("checkpoint expects " + std::to_string(input_dim) + " features, dataset has " +
                         std::to_string(data.dataset.feature_dim()));
  }
  Tape tape;
  Tensor x = tape.constant(data.dataset.features);
  if (ck.glcn) {
    std::optional<GraphPrior> prior;
    if (ck.glcn->graph_cfg.prior_mode != PriorMode::none) {
      if (!data.prior) throw ConfigError("model was trained with a prior graph but none is available");
      prior = GraphPrior::from_adjacency(*data.prior);
    }
    return glcn_predict(tape, *ck.glcn, x, prior ? &*prior : nullptr).hidden[layer - 1].value();
  }
  if (!data.prior) throw ConfigError("gcn checkpoint needs a graph for its dataset");
  GcnModel model = *ck.gcn;
  model.adjacency = normalize_adjacency(*data.prior);
  return gcn_predict(tape, model, x).hidden[layer - 1].value();
}

/// Header: node,label,h0..h{w-1}.
inline void write_embeddings_csv(const Matrix& h, const Dataset& ds, std::ostream& out) {
  out << "node,label";
  for (std::size_t k = 0; k < h.cols(); ++k) out << ",h" << k;
  out << '\n';
  for (std::size_t i = 0; i < h.rows(); ++i) {
    out << (ds.node_names.empty() ? std::to_string(i) : ds.node_names[i]) << ','
        << (ds.class_names.empty() ? std::to_string(ds.label_of(i)) : ds.class_names[ds.label_of(i)]);
    for (double v : h.row(i)) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

/// Trains every seed and writes, under cfg.output_dir:
///   config.json, summary.json, timing.json and per seed
///   seed_<s>/{report.json, checkpoint.json, splits.json[, graph.csv]}.
inline nlohmann::json cmd_train(const RunConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  if (cfg.output_dir.empty()) throw ConfigError("output_dir is required");
  const std::filesystem::path out = cfg.output_dir;
  std::filesystem::create_directories(out);
  detail::write_json(out / "config.json", to_json(cfg));

  const PreparedData data = prepare_data(cfg);
  const auto runs = detail::run_seeds(cfg, data, log);
  nlohmann::json timing = nlohmann::json::object();
  for (const auto& r : runs) {
    const auto dir = out / ("seed_" + std::to_string(r.seed));
    std::filesystem::create_directories(dir);
    detail::write_json(dir / "report.json", to_json(r.report));
    detail::write_json(dir / "splits.json", {{"train", r.splits.train}, {"val", r.splits.val}, {"test", r.splits.test}});
    save_checkpoint(r.checkpoint, dir / "checkpoint.json");
    timing[std::to_string(r.seed)] = r.report.wall_seconds;
    if (cfg.export_graph_threshold && cfg.model == "glcn") {
      const Checkpoint ck = checkpoint_from_json(r.checkpoint);
      std::ofstream g(dir / "graph.csv");
      write_graph_csv(learned_graph(*ck.glcn, data), *cfg.export_graph_threshold, g);
    }
  }
  detail::write_json(out / "timing.json", timing);
  nlohmann::json summary = detail::summary_json(cfg, runs);
  detail::write_json(out / "summary.json", summary);
  return summary;
}

enum class SweepAxis { depth, width, lambda };

inline SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "depth") return SweepAxis::depth;
  if (s == "width") return SweepAxis::width;
  if (s == "lambda") return SweepAxis::lambda;
  throw ConfigError("unknown sweep axis '" + s + "' (expected depth|width|lambda)");
}

/// Config for one sweep cell.
inline RunConfig sweep_cell(RunConfig cfg, SweepAxis axis, double value) {
  auto as_count = [&](double v) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sweep value " + std::to_string(v) + " must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  switch (axis) {
    case SweepAxis::depth:
      cfg.hidden = std::vector<std::size_t>(as_count(value), cfg.hidden.front());
      break;
    case SweepAxis::width:
      cfg.hidden = std::vector<std::size_t>(cfg.hidden.size(), as_count(value));
      break;
    case SweepAxis::lambda:
      if (!(value >= 0.0)) throw ConfigError("lambda values must be >= 0");
      cfg.lambda = value;
      break;
  }
  return cfg;
}

/// Trains each model x value x seed and writes sweep.json plus a TSV table
/// (one row per model, one column per value, mean test accuracy).
inline nlohmann::json cmd_sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values,
                                const std::vector<std::string>& models, std::ostream* log = nullptr) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (models.empty()) throw ConfigError("sweep needs at least one model");
  for (const auto& m : models) {
    if (m != "glcn" && m != "gcn") throw ConfigError("unknown model '" + m + "' in sweep");
    if (axis == SweepAxis::lambda && m == "gcn") throw ConfigError("the lambda axis only applies to glcn");
  }
  if (base.output_dir.empty()) throw ConfigError("output_dir is required");
  const std::filesystem::path out = base.output_dir;
  std::filesystem::create_directories(out);
  const char* axis_name = axis == SweepAxis::depth ? "depth" : axis == SweepAxis::width ? "width" : "lambda";

  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream table;
  table << axis_name;
  for (double v : values) table << '\t' << v;
  table << '\n';
  for (const auto& m : models) {
    RunConfig model_cfg = base;
    model_cfg.model = m;
    nlohmann::json cells = nlohmann::json::array();
    table << m;
    for (double v : values) {
      RunConfig cfg = sweep_cell(model_cfg, axis, v);
      std::ostringstream sub;
      sub << m << '_' << axis_name << '_' << v;
      cfg.output_dir = (out / sub.str()).string();
      cfg.validate();
      nlohmann::json s = cmd_train(cfg, log);
      cells.push_back({{"value", v},
                       {"mean_test_accuracy", s.at("mean_test_accuracy")},
                       {"std_test_accuracy", s.at("std_test_accuracy")},
                       {"mean_train_ce", s.at("mean_train_ce")},
                       {"runs", s.at("runs")}});
      table << '\t' << fmt4(s.at("mean_test_accuracy").get<double>());
    }
    table << '\n';
    rows.push_back({{"model", m}, {"cells", cells}});
  }
  nlohmann::json result = {{"axis", axis_name}, {"values", values}, {"rows", rows}, {"table", table.str()}};
  detail::write_json(out / "sweep.json", result);
  std::ofstream(out / "sweep.tsv") << table.str();
  return result;
}

}  // namespace glcn
