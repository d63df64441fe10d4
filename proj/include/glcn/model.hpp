#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "glcn/errors.hpp"
#include "glcn/gconv.hpp"
#include "glcn/graph_learning.hpp"
#include "glcn/matrix.hpp"
#include "glcn/ops.hpp"
#include "glcn/optim.hpp"
#include "glcn/tape.hpp"

namespace glcn {

/// Floor applied to probabilities before the log in cross_entropy.
inline constexpr double kLogFloor = 1e-12;

namespace detail {

inline std::vector<GraphConvLayer> make_layers(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                                               std::size_t classes, Rng& rng, GraphConvLayer& output) {
  std::vector<GraphConvLayer> layers;
  std::size_t in = input_dim;
  for (std::size_t k = 0; k < hidden.size(); ++k) {
    if (hidden[k] == 0) throw ConfigError("hidden layer " + std::to_string(k) + " has zero width");
    layers.push_back({{"conv" + std::to_string(k) + ".weight", glorot_init(in, hidden[k], rng)}, Activation::relu});
    in = hidden[k];
  }
  output = {{"output.weight", glorot_init(in, classes, rng)}, Activation::none};
  return layers;
}

inline void check_chain(std::size_t input_dim, const std::vector<GraphConvLayer>& conv, const GraphConvLayer& output) {
  std::size_t in = input_dim;
  for (const auto& layer : conv) {
    if (layer.weight.value.rows() != in) {
      throw ConfigError("layer '" + layer.weight.name + "' expects width " + std::to_string(layer.weight.value.rows()) +
                        " but receives " + std::to_string(in));
    }
    in = layer.weight.value.cols();
  }
  if (output.weight.value.rows() != in) {
    throw ConfigError("output layer expects width " + std::to_string(output.weight.value.rows()) + " but receives " +
                      std::to_string(in));
  }
}

}  // namespace detail

/// Graph-learning layer, K graph convolutions and a softmax perceptron.
struct GlcnModel {
  GraphLearnConfig graph_cfg;
  GraphLearnParams graph;
  std::vector<GraphConvLayer> conv;
  GraphConvLayer output;
  double lambda = 0.01;

  static GlcnModel create(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t classes,
                          const GraphLearnConfig& cfg, double lambda, Rng& rng) {
    if (input_dim == 0 || classes == 0) throw ConfigError("input dimension and class count must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    GlcnModel m;
    m.graph_cfg = cfg;
    m.lambda = lambda;
    const std::size_t d = cfg.use_projection ? cfg.embed_dim : input_dim;
    if (d == 0) throw ConfigError("embed_dim must be >= 1");
    if (cfg.use_projection) m.graph.projection.value = glorot_init(input_dim, d, rng);
    m.graph.edge_weights.value = glorot_init(d, 1, rng);
    m.conv = detail::make_layers(input_dim, hidden, classes, rng, m.output);
    return m;
  }

  std::size_t input_dim() const { return conv.empty() ? output.weight.value.rows() : conv.front().weight.value.rows(); }
  std::size_t classes() const { return output.weight.value.cols(); }
  std::size_t embed_dim() const { return graph.edge_weights.value.rows(); }

  void validate() const {
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    const std::size_t p = input_dim();
    if (graph_cfg.use_projection) {
      if (graph.projection.value.rows() != p || graph.projection.value.cols() != embed_dim()) {
        throw ConfigError("projection shape " + graph.projection.value.shape() + " does not chain with input width " +
                          std::to_string(p) + " and edge weights " + graph.edge_weights.value.shape());
      }
    } else if (embed_dim() != p) {
      throw ConfigError("edge weights " + graph.edge_weights.value.shape() + " do not match input width " +
                        std::to_string(p));
    }
    if (graph.edge_weights.value.cols() != 1) throw ConfigError("edge weights must be a column vector");
    detail::check_chain(p, conv, output);
  }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> ps;
    if (graph_cfg.use_projection) ps.push_back(&graph.projection);
    ps.push_back(&graph.edge_weights);
    for (auto& l : conv) ps.push_back(&l.weight);
    ps.push_back(&output.weight);
    return ps;
  }
  std::vector<const Parameter*> parameters() const {
    auto ps = const_cast<GlcnModel*>(this)->parameters();
    return {ps.begin(), ps.end()};
  }
};

/// GCN baseline on a fixed symmetric-normalized adjacency.
struct GcnModel {
  std::vector<GraphConvLayer> conv;
  GraphConvLayer output;
  NormalizedAdjacency adjacency;

  static GcnModel create(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t classes,
                         NormalizedAdjacency adjacency, Rng& rng) {
    if (input_dim == 0 || classes == 0) throw ConfigError("input dimension and class count must be positive");
    GcnModel m;
    m.conv = detail::make_layers(input_dim, hidden, classes, rng, m.output);
    m.adjacency = std::move(adjacency);
    return m;
  }

  std::size_t input_dim() const { return conv.empty() ? output.weight.value.rows() : conv.front().weight.value.rows(); }
  std::size_t classes() const { return output.weight.value.cols(); }

  void validate() const { detail::check_chain(input_dim(), conv, output); }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> ps;
    for (auto& l : conv) ps.push_back(&l.weight);
    ps.push_back(&output.weight);
    return ps;
  }
  std::vector<const Parameter*> parameters() const {
    auto ps = const_cast<GcnModel*>(this)->parameters();
    return {ps.begin(), ps.end()};
  }
};

/// Everything a forward pass exposes. `loss_gl` and `embedded` are only
/// set for GLCN.
struct ForwardResult {
  Tensor z;
  Tensor graph;
  Tensor loss_gl;
  Tensor embedded;
  std::vector<Tensor> hidden;
};

/// Convolution stack + perceptron on a given graph. Exposed separately so a
/// fixed graph can be pinned in place of the learned one.
inline ForwardResult glcn_propagate(const GlcnModel& model, const Tensor& graph, const Tensor& x) {
  ForwardResult r;
  r.graph = graph;
  Tensor h = x;
  for (const auto& layer : model.conv) {
    h = glcn_forward(layer, graph, h);
    r.hidden.push_back(h);
  }
  if (model.conv.empty()) require_row_stochastic(graph.value());
  r.z = perceptron_layer(graph, h, x.tape().parameter(model.output.weight));
  return r;
}

inline ForwardResult glcn_predict(Tape& tape, const GlcnModel& model, const Tensor& x, const GraphPrior* prior) {
  if (x.cols() != model.input_dim()) {
    throw DimensionError("glcn_predict: model expects " + std::to_string(model.input_dim()) + " features, got " +
                         std::to_string(x.cols()));
  }
  LearnedGraph lg = learn_graph(tape, x, prior, model.graph, model.graph_cfg);
  ForwardResult r = glcn_propagate(model, lg.graph, x);
  r.embedded = lg.embedded;
  r.loss_gl = graph_learn_loss(lg.embedded, lg.graph, prior, model.graph_cfg);
  return r;
}

inline ForwardResult gcn_predict(Tape& tape, const GcnModel& model, const Tensor& x) {
  if (x.cols() != model.input_dim()) {
    throw DimensionError("gcn_predict: model expects " + std::to_string(model.input_dim()) + " features, got " +
                         std::to_string(x.cols()));
  }
  if (model.adjacency.matrix.rows() != x.rows()) {
    throw DimensionError("gcn_predict: adjacency " + model.adjacency.matrix.shape() + " vs " +
                         std::to_string(x.rows()) + " nodes");
  }
  ForwardResult r;
  r.graph = tape.constant(model.adjacency.matrix);
  Tensor h = x;
  for (const auto& layer : model.conv) {
    h = gcn_forward(layer, r.graph, h);
    r.hidden.push_back(h);
  }
  r.z = perceptron_layer(r.graph, h, tape.parameter(model.output.weight));
  return r;
}

/// -sum_{i in idx} sum_j Y_ij ln max(Z_ij, kLogFloor). Y rows in idx must be
/// one-hot.
inline Tensor cross_entropy(const Tensor& z, const Matrix& y, std::span<const std::size_t> idx) {
  Matrix::require_same_shape(z.value(), y, "cross_entropy");
  Matrix selected(y.rows(), y.cols());
  for (std::size_t i : idx) {
    if (i >= y.rows()) throw DimensionError("cross_entropy: index " + std::to_string(i) + " out of range");
    double sum = 0.0;
    for (double v : y.row(i)) {
      if (v != 0.0 && v != 1.0) throw ContractError("cross_entropy: label row " + std::to_string(i) + " is not one-hot");
      sum += v;
    }
    if (sum != 1.0) throw ContractError("cross_entropy: label row " + std::to_string(i) + " is not one-hot");
    std::copy(y.row(i).begin(), y.row(i).end(), selected.row(i).begin());
  }
  Tape& tape = z.tape();
  return scale(total_sum(hadamard(tape.constant(std::move(selected)), log(clamp_min(z, kLogFloor)))), -1.0);
}

/// Fraction of rows in idx whose argmax matches the label argmax.
inline double accuracy(const Matrix& z, const Matrix& y, std::span<const std::size_t> idx) {
  Matrix::require_same_shape(z, y, "accuracy");
  if (idx.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i : idx) {
    auto zr = z.row(i);
    auto yr = y.row(i);
    const auto pz = std::max_element(zr.begin(), zr.end()) - zr.begin();
    const auto py = std::max_element(yr.begin(), yr.end()) - yr.begin();
    hits += pz == py ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(idx.size());
}

struct LossParts {
  Tensor total;
  Tensor ce;
  Tensor gl;
  ForwardResult forward;
};

/// cross-entropy + lambda * graph-learning loss.
inline LossParts glcn_loss(Tape& tape, const GlcnModel& model, const Tensor& x, const GraphPrior* prior,
                           const Matrix& y, std::span<const std::size_t> idx) {
  LossParts p;
  p.forward = glcn_predict(tape, model, x, prior);
  p.ce = cross_entropy(p.forward.z, y, idx);
  p.gl = p.forward.loss_gl;
  p.total = model.lambda == 0.0 ? p.ce : add(p.ce, scale(p.gl, model.lambda));
  return p;
}

inline LossParts gcn_loss(Tape& tape, const GcnModel& model, const Tensor& x, const Matrix& y,
                          std::span<const std::size_t> idx) {
  LossParts p;
  p.forward = gcn_predict(tape, model, x);
  p.ce = cross_entropy(p.forward.z, y, idx);
  p.total = p.ce;
  return p;
}

}  // namespace glcn
