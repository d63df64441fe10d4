#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glcn/data.hpp"
#include "glcn/errors.hpp"
#include "glcn/model.hpp"
#include "glcn/optim.hpp"
#include "glcn/tape.hpp"

namespace glcn {

/// Which validation quantity drives early stopping.
enum class Monitor { total, ce };

struct TrainConfig {
  int max_epochs = 3000;
  int patience = 100;
  double lr = 0.005;
  std::uint64_t seed = 0;
  Monitor monitor = Monitor::total;

  void validate() const {
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (patience > max_epochs) throw ConfigError("patience must not exceed max_epochs");
    if (!(lr > 0.0)) throw ConfigError("learning rate must be > 0");
  }
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_ce = 0.0;
  double train_gl = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int stopped_epoch = 0;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  // Metrics below are recomputed from the restored best parameters.
  double train_ce = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  double wall_seconds = 0.0;  ///< not serialized; see timing output
};

/// Serializes everything except wall-clock time, so equal runs produce
/// byte-identical documents.
inline nlohmann::json to_json(const TrainReport& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"train_ce", e.train_ce},
                      {"train_gl", e.train_gl},
                      {"val_loss", e.val_loss},
                      {"val_accuracy", e.val_accuracy}});
  }
  return {{"stopped_epoch", r.stopped_epoch}, {"best_epoch", r.best_epoch},
          {"best_val_loss", r.best_val_loss}, {"train_ce", r.train_ce},
          {"train_accuracy", r.train_accuracy}, {"val_accuracy", r.val_accuracy},
          {"test_accuracy", r.test_accuracy}, {"epochs", std::move(epochs)}};
}

inline TrainReport report_from_json(const nlohmann::json& j) {
  TrainReport r;
  r.stopped_epoch = j.at("stopped_epoch").get<int>();
  r.best_epoch = j.at("best_epoch").get<int>();
  r.best_val_loss = j.at("best_val_loss").get<double>();
  r.train_ce = j.at("train_ce").get<double>();
  r.train_accuracy = j.at("train_accuracy").get<double>();
  r.val_accuracy = j.at("val_accuracy").get<double>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  for (const auto& e : j.at("epochs")) {
    r.epochs.push_back({e.at("epoch").get<int>(), e.at("train_loss").get<double>(), e.at("train_ce").get<double>(),
                        e.at("train_gl").get<double>(), e.at("val_loss").get<double>(),
                        e.at("val_accuracy").get<double>()});
  }
  return r;
}

using EpochCallback = std::function<void(const EpochRecord&)>;

namespace detail {

inline void require_trainable_splits(const Dataset& ds) {
  if (ds.splits.train.empty() || ds.splits.val.empty() || ds.splits.test.empty()) {
    throw ConfigError("training needs nonempty train, val and test splits");
  }
  ds.validate();
}

// Forward: (Tape&, const Tensor& x) -> ForwardResult, with loss_gl set only
// when the model has a graph-learning term weighted by `lambda`.
template <class Model, class Forward>
TrainReport train_loop(Model& model, const Dataset& ds, const TrainConfig& cfg, double lambda, Forward&& forward,
                       const EpochCallback& on_epoch) {
  cfg.validate();
  require_trainable_splits(ds);
  model.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<Parameter*> params = model.parameters();
  Adam adam(params, {.lr = cfg.lr});
  std::vector<Matrix> best(params.size());
  TrainReport report;
  report.best_val_loss = std::numeric_limits<double>::infinity();
  int last_finite = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Tape tape;
    Tensor x = tape.constant(ds.features);
    ForwardResult fr = forward(tape, x);
    Tensor ce = cross_entropy(fr.z, ds.labels, ds.splits.train);
    const bool has_gl = fr.loss_gl.valid();
    Tensor total = has_gl && lambda != 0.0 ? add(ce, scale(fr.loss_gl, lambda)) : ce;
    // Recorded after `total`, so backward never visits it.
    const double val_ce = cross_entropy(fr.z, ds.labels, ds.splits.val).scalar();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total.scalar();
    rec.train_ce = ce.scalar();
    rec.train_gl = has_gl ? fr.loss_gl.scalar() : 0.0;
    rec.val_loss = cfg.monitor == Monitor::ce || !has_gl ? val_ce : val_ce + lambda * rec.train_gl;
    rec.val_accuracy = accuracy(fr.z.value(), ds.labels, ds.splits.val);
    if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.val_loss)) {
      throw TrainingError("loss diverged at epoch " + std::to_string(epoch) + "; last finite epoch " +
                              std::to_string(last_finite),
                          last_finite);
    }
    last_finite = epoch;
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.val_loss < report.best_val_loss) {
      report.best_val_loss = rec.val_loss;
      report.best_epoch = epoch;
      for (std::size_t k = 0; k < params.size(); ++k) best[k] = params[k]->value;
    } else if (epoch - report.best_epoch >= cfg.patience) {
      report.stopped_epoch = epoch;
      break;
    }

    tape.backward(total);
    try {
      adam.step(tape);
    } catch (const TrainingError& e) {
      throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch), last_finite);
    }
  }
  if (report.stopped_epoch == 0) report.stopped_epoch = cfg.max_epochs;

  for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = best[k];
  Tape tape;
  ForwardResult fr = forward(tape, tape.constant(ds.features));
  report.train_ce = cross_entropy(fr.z, ds.labels, ds.splits.train).scalar();
  report.train_accuracy = accuracy(fr.z.value(), ds.labels, ds.splits.train);
  report.val_accuracy = accuracy(fr.z.value(), ds.labels, ds.splits.val);
  report.test_accuracy = accuracy(fr.z.value(), ds.labels, ds.splits.test);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace detail

/// Full-batch ADAM on cross-entropy + lambda * L_GL with validation early
/// stopping. On return the model holds the best-validation parameters.
inline TrainReport train(GlcnModel& model, const Dataset& ds, const GraphPrior* prior, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {}) {
  model.graph_cfg.validate(prior != nullptr);
  return detail::train_loop(
      model, ds, cfg, model.lambda,
      [&](Tape& tape, const Tensor& x) { return glcn_predict(tape, model, x, prior); }, on_epoch);
}

inline TrainReport train(GcnModel& model, const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  return detail::train_loop(
      model, ds, cfg, 0.0, [&](Tape& tape, const Tensor& x) { return gcn_predict(tape, model, x); }, on_epoch);
}

}  // namespace glcn
