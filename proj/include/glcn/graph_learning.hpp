#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "glcn/errors.hpp"
#include "glcn/matrix.hpp"
#include "glcn/ops.hpp"
#include "glcn/tape.hpp"

namespace glcn {

/// How a prior adjacency enters graph learning.
enum class PriorMode { none, mask, regularize, mask_regularize };

inline std::string_view to_string(PriorMode m) {
  switch (m) {
    case PriorMode::none: return "none";
    case PriorMode::mask: return "mask";
    case PriorMode::regularize: return "regularize";
    case PriorMode::mask_regularize: return "mask+regularize";
  }
  return "none";
}

inline PriorMode parse_prior_mode(std::string_view s) {
  if (s == "none") return PriorMode::none;
  if (s == "mask") return PriorMode::mask;
  if (s == "regularize") return PriorMode::regularize;
  if (s == "mask+regularize") return PriorMode::mask_regularize;
  throw ConfigError("unknown prior mode '" + std::string(s) + "' (expected none|mask|regularize|mask+regularize)");
}

inline bool uses_mask(PriorMode m) { return m == PriorMode::mask || m == PriorMode::mask_regularize; }
inline bool uses_regularizer(PriorMode m) { return m == PriorMode::regularize || m == PriorMode::mask_regularize; }

struct GraphLearnConfig {
  bool use_projection = true;
  std::size_t embed_dim = 70;
  double gamma = 1.0;  ///< weight of ||S||_F^2
  double beta = 0.0;   ///< weight of ||S - A||_F^2, needs a prior
  PriorMode prior_mode = PriorMode::none;

  void validate(bool has_prior) const {
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
    if (use_projection && embed_dim == 0) throw ConfigError("embed_dim must be >= 1 when projection is enabled");
    if (beta > 0.0 && !has_prior) throw ConfigError("beta > 0 requires a prior graph");
    if (prior_mode != PriorMode::none && !has_prior) {
      throw ConfigError("prior mode '" + std::string(to_string(prior_mode)) + "' requires a prior graph");
    }
  }
};

/// Projection P [p x d] (unused when projection is disabled) and edge-score
/// weights a [d x 1].
struct GraphLearnParams {
  Parameter projection{"graph.projection", {}};
  Parameter edge_weights{"graph.edge_weights", {}};
};

/// A prior adjacency together with the softmax mask derived from it (same
/// matrix with the diagonal forced to 1).
struct GraphPrior {
  Matrix adjacency;
  Matrix mask;

  static GraphPrior from_adjacency(Matrix a) {
    if (a.rows() != a.cols()) throw DimensionError("prior adjacency must be square, got " + a.shape());
    for (double v : a.values())
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("prior adjacency must be finite and nonnegative");
    GraphPrior p;
    p.mask = a;
    for (std::size_t i = 0; i < a.rows(); ++i) p.mask(i, i) = 1.0;
    p.adjacency = std::move(a);
    return p;
  }
};

struct LearnedGraph {
  Tensor graph;     ///< S [n x n], row-stochastic
  Tensor embedded;  ///< x P, or x itself without projection
};

/// S_ij = A_ij exp(relu(a^T |x~_i - x~_j|)) / sum_j (...), with x~ = x P.
/// Without a mask prior every A_ij is 1.
inline LearnedGraph learn_graph(Tape& tape, const Tensor& x, const GraphPrior* prior,
                                const GraphLearnParams& params, const GraphLearnConfig& cfg) {
  const bool masked = uses_mask(cfg.prior_mode);
  if (masked && !prior) throw ConfigError("masked graph learning requires a prior graph");
  if (prior && prior->mask.rows() != x.rows()) {
    throw DimensionError("prior " + prior->mask.shape() + " does not match " + std::to_string(x.rows()) + " nodes");
  }
  Tensor embedded = cfg.use_projection ? matmul(x, tape.parameter(params.projection)) : x;
  Tensor scores = pairwise_abs_diff_project(embedded, tape.parameter(params.edge_weights));
  Tensor s = masked ? row_softmax(scores, prior->mask) : row_softmax(scores);
  return {s, embedded};
}

/// sum_ij ||x~_i - x~_j||^2 S_ij + gamma ||S||_F^2 (+ beta ||S - A||_F^2).
inline Tensor graph_learn_loss(const Tensor& embedded, const Tensor& graph, const GraphPrior* prior,
                               const GraphLearnConfig& cfg) {
  Tape& tape = graph.tape();
  if (embedded.rows() != graph.rows() || graph.rows() != graph.cols()) {
    throw DimensionError("graph_learn_loss: embedding " + embedded.value().shape() + " vs graph " +
                         graph.value().shape());
  }
  if (cfg.beta > 0.0 && !prior) throw ConfigError("beta > 0 requires a prior graph");

  Tensor loss = total_sum(hadamard(pairwise_sq_dist(embedded), graph));
  if (cfg.gamma != 0.0) loss = add(loss, scale(frobenius_sq(graph), cfg.gamma));
  if (uses_regularizer(cfg.prior_mode) && cfg.beta != 0.0) {
    if (prior->adjacency.rows() != graph.rows()) throw DimensionError("graph_learn_loss: prior size mismatch");
    Tensor residual = sub(graph, tape.constant(prior->adjacency));
    loss = add(loss, scale(frobenius_sq(residual), cfg.beta));
  }
  return loss;
}

}  // namespace glcn
