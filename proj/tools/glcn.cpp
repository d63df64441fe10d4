// Command-line front end: train, sweep, export-graph, export-embeddings, gen-synth.
//
// Exit codes: 0 success, 1 user error (bad config, bad input files), 2 runtime
// failure (divergence, unexpected errors).

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "glcn/glcn.hpp"

namespace {

constexpr int kExitUser = 1;
constexpr int kExitRuntime = 2;

// Command-line values layered over the JSON config document.
struct Overrides {
  std::string config_path;
  std::optional<std::string> model, dataset_dir, prior, prior_mode, monitor, out;
  std::optional<double> lambda, gamma, beta, lr, sigma, threshold;
  std::optional<int> epochs, patience, jobs;
  std::optional<std::size_t> knn_k, embed_dim, labels_per_class, total_labeled, val, test;
  std::vector<std::size_t> hidden;
  std::vector<std::uint64_t> seeds;
  bool synth = false, no_projection = false, row_normalize = false, graph_free = false;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--model", model, "glcn | gcn");
    app.add_option("--dataset-dir", dataset_dir, "directory with features.csv, labels.csv[, edges.txt, splits.json]");
    app.add_flag("--synth", synth, "use the synthetic blobs dataset from the config defaults");
    app.add_flag("--row-normalize", row_normalize, "scale feature rows to unit sum");
    app.add_flag("--graph-free", graph_free, "accept a dataset without edges");
    app.add_option("--prior", prior, "prior graph source: auto | none | dataset | knn");
    app.add_option("--knn-k", knn_k, "neighbours for the k-NN prior");
    app.add_option("--knn-sigma", sigma, "Gaussian kernel width (default: mean k-th neighbour distance)");
    app.add_option("--prior-mode", prior_mode, "none | mask | regularize | mask+regularize");
    app.add_option("--lambda", lambda, "weight of the graph-learning loss");
    app.add_option("--gamma", gamma, "weight of ||S||_F^2");
    app.add_option("--beta", beta, "weight of ||S - A||_F^2");
    app.add_option("--embed-dim", embed_dim, "graph-learning embedding width");
    app.add_flag("--no-projection", no_projection, "learn the graph on raw features");
    app.add_option("--hidden", hidden, "convolution layer widths")->delimiter(',');
    app.add_option("--epochs", epochs, "maximum epochs");
    app.add_option("--patience", patience, "early-stopping patience");
    app.add_option("--lr", lr, "ADAM learning rate");
    app.add_option("--monitor", monitor, "early-stopping signal: total | ce");
    app.add_option("--labels-per-class", labels_per_class, "stratified labelled nodes per class");
    app.add_option("--total-labeled", total_labeled, "labelled nodes drawn uniformly (instead of per class)");
    app.add_option("--val", val, "validation nodes");
    app.add_option("--test", test, "test nodes (default from config; 0 = all remaining)");
    app.add_option("--seeds", seeds, "seeds, one run each")->delimiter(',');
    app.add_option("--jobs", jobs, "seeds trained concurrently");
    app.add_option("--export-graph-threshold", threshold, "also write each learned graph above this weight");
    app.add_option("--out", out, "output directory");
  }

  glcn::RunConfig resolve() const {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw glcn::ConfigError(config_path + ": " + e.what());
      }
    }
    auto set = [&](const char* section, const char* key, const nlohmann::json& v) {
      if (!j.contains(section) || !j[section].is_object()) j[section] = nlohmann::json::object();
      j[section][key] = v;
    };
    if (model) j["model"] = *model;
    if (dataset_dir) {
      set("data", "dir", *dataset_dir);
      set("data", "synth", nullptr);
    }
    if (synth) {
      set("data", "dir", "");
      if (!j["data"].contains("synth") || j["data"]["synth"].is_null()) set("data", "synth", nlohmann::json::object());
    }
    if (row_normalize) set("data", "row_normalize", true);
    if (graph_free) set("data", "graph_free", true);
    if (prior) {
      set("prior", "source", *prior);
      if (*prior == "none" && !prior_mode) set("graph", "prior_mode", "none");
    }
    if (knn_k) set("prior", "k", *knn_k);
    if (sigma) set("prior", "sigma", *sigma);
    if (prior_mode) set("graph", "prior_mode", *prior_mode);
    if (gamma) set("graph", "gamma", *gamma);
    if (beta) set("graph", "beta", *beta);
    if (embed_dim) set("graph", "embed_dim", *embed_dim);
    if (no_projection) set("graph", "use_projection", false);
    if (lambda) j["lambda"] = *lambda;
    if (!hidden.empty()) j["hidden"] = hidden;
    if (epochs) set("train", "max_epochs", *epochs);
    if (patience) set("train", "patience", *patience);
    if (lr) set("train", "lr", *lr);
    if (monitor) set("train", "monitor", *monitor);
    if (labels_per_class) {
      set("splits", "labels_per_class", *labels_per_class);
      set("splits", "total_labeled", nullptr);
    }
    if (total_labeled) {
      set("splits", "total_labeled", *total_labeled);
      set("splits", "labels_per_class", nullptr);
    }
    if (val) set("splits", "val", *val);
    if (test) set("splits", "test", *test == 0 ? nlohmann::json(nullptr) : nlohmann::json(*test));
    if (!seeds.empty()) j["seeds"] = seeds;
    if (jobs) j["jobs"] = *jobs;
    if (threshold) j["export_graph_threshold"] = *threshold;
    if (out) j["output_dir"] = *out;
    return glcn::run_config_from_json(j);
  }
};

// Rebuilds the dataset a checkpoint was trained on, optionally from another directory.
glcn::PreparedData checkpoint_data(const glcn::Checkpoint& ck, const std::optional<std::string>& dataset_dir) {
  nlohmann::json run = ck.run;
  if (dataset_dir) {
    run["data"]["dir"] = *dataset_dir;
    run["data"]["synth"] = nullptr;
  }
  run["output_dir"] = "";
  return glcn::prepare_data(glcn::run_config_from_json(run));
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw glcn::ConfigError("cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph learning-convolutional networks for semi-supervised node classification"};
  app.require_subcommand(1);

  Overrides train_opts;
  auto* train_cmd = app.add_subcommand("train", "train GLCN or GCN over one or more seeds");
  train_opts.attach(*train_cmd);

  Overrides sweep_opts;
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> models{"glcn"};
  auto* sweep_cmd = app.add_subcommand("sweep", "train across depth, width or lambda values");
  sweep_opts.attach(*sweep_cmd);
  sweep_cmd->add_option("--axis", axis, "depth | width | lambda")->required();
  sweep_cmd->add_option("--values", values, "comma-separated axis values")->delimiter(',')->required();
  sweep_cmd->add_option("--models", models, "models to compare (glcn,gcn)")->delimiter(',');

  std::string ck_path, out_path;
  std::optional<std::string> ck_dataset;
  double threshold = 0.0;
  auto* graph_cmd = app.add_subcommand("export-graph", "write the learned graph of a GLCN checkpoint");
  graph_cmd->add_option("--checkpoint", ck_path)->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--dataset-dir", ck_dataset, "dataset to evaluate on (default: the training dataset)");
  graph_cmd->add_option("--threshold", threshold, "only entries strictly above this weight are listed");
  graph_cmd->add_option("--out", out_path, "output CSV")->required();

  std::size_t layer = 1;
  auto* emb_cmd = app.add_subcommand("export-embeddings", "write hidden-layer activations as CSV");
  emb_cmd->add_option("--checkpoint", ck_path)->required()->check(CLI::ExistingFile);
  emb_cmd->add_option("--dataset-dir", ck_dataset, "dataset to evaluate on (default: the training dataset)");
  emb_cmd->add_option("--layer", layer, "convolution layer, 1-based");
  emb_cmd->add_option("--out", out_path, "output CSV")->required();

  glcn::SynthSpec synth;
  std::string synth_out;
  std::optional<std::size_t> synth_knn;
  auto* synth_cmd = app.add_subcommand("gen-synth", "write a Gaussian-blobs dataset directory");
  synth_cmd->add_option("--n-per-class", synth.n_per_class);
  synth_cmd->add_option("--classes", synth.classes);
  synth_cmd->add_option("--features", synth.features);
  synth_cmd->add_option("--noise", synth.noise_sigma);
  synth_cmd->add_option("--separation", synth.separation);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--knn", synth_knn, "also write edges.txt from a k-NN Gaussian graph");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUser;
  }

  try {
    if (*train_cmd) {
      const glcn::RunConfig cfg = train_opts.resolve();
      const auto summary = glcn::cmd_train(cfg, &std::cerr);
      std::cout << cfg.model << " mean test accuracy " << summary.at("table").get<std::string>() << " over "
                << cfg.seeds.size() << " seed(s)\n";
    } else if (*sweep_cmd) {
      const glcn::RunConfig cfg = sweep_opts.resolve();
      const auto result = glcn::cmd_sweep(cfg, glcn::parse_sweep_axis(axis), values, models, &std::cerr);
      std::cout << result.at("table").get<std::string>();
    } else if (*graph_cmd) {
      const glcn::Checkpoint ck = glcn::load_checkpoint(ck_path);
      if (!ck.glcn) throw glcn::ConfigError("export-graph needs a glcn checkpoint, got '" + ck.kind + "'");
      const auto data = checkpoint_data(ck, ck_dataset);
      auto out = open_output(out_path);
      glcn::write_graph_csv(glcn::learned_graph(*ck.glcn, data), threshold, out);
    } else if (*emb_cmd) {
      const glcn::Checkpoint ck = glcn::load_checkpoint(ck_path);
      const auto data = checkpoint_data(ck, ck_dataset);
      const glcn::Matrix h = glcn::layer_embeddings(ck, data, layer);
      auto out = open_output(out_path);
      glcn::write_embeddings_csv(h, data.dataset, out);
    } else if (*synth_cmd) {
      glcn::Dataset ds = glcn::synth_blobs(synth);
      if (synth_knn) ds.adjacency = glcn::knn_gaussian_graph(ds.features, *synth_knn);
      glcn::save_dataset_dir(ds, synth_out);
      std::cout << "wrote " << ds.nodes() << " nodes to " << synth_out << '\n';
    }
  } catch (const glcn::TrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const glcn::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const glcn::LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const glcn::DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
