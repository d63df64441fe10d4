#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "glcn/errors.hpp"
#include "glcn/matrix.hpp"
#include "glcn/ops.hpp"
#include "glcn/tape.hpp"

namespace glcn {

enum class Activation { relu, none };

struct GraphConvLayer {
  Parameter weight;
  Activation activation = Activation::relu;
};

/// D^{-1/2} (A + I) D^{-1/2} with D the row sums of A + I.
struct NormalizedAdjacency {
  Matrix matrix;
};

inline NormalizedAdjacency normalize_adjacency(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("normalize_adjacency: adjacency must be square, got " + a.shape());
  for (double v : a.values()) {
    if (v < 0.0) throw DomainError("normalize_adjacency: negative entry " + std::to_string(v));
    if (!std::isfinite(v)) throw DomainError("normalize_adjacency: non-finite entry");
  }
  const std::size_t n = a.rows();
  Matrix m = a;
  for (std::size_t i = 0; i < n; ++i) m(i, i) += 1.0;
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (double v : m.row(i)) deg += v;
    inv_sqrt[i] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  return {std::move(m)};
}

/// Throws ContractError unless every row is nonnegative and sums to 1 within tol.
inline void require_row_stochastic(const Matrix& s, double tol = 1e-6) {
  if (s.rows() != s.cols()) throw DimensionError("graph must be square, got " + s.shape());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double sum = 0.0;
    for (double v : s.row(i)) {
      if (v < 0.0) throw ContractError("graph row " + std::to_string(i) + " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw ContractError("graph row " + std::to_string(i) + " sums to " + std::to_string(sum) + ", not 1");
    }
  }
}

namespace detail {

// sigma(G (x W)); multiplying x W first keeps the n x n product on the
// narrower side.
inline Tensor propagate(const Tensor& graph, const Tensor& x, const Tensor& w, Activation act) {
  if (graph.cols() != x.rows()) {
    throw DimensionError("propagate: graph " + graph.value().shape() + " vs features " + x.value().shape());
  }
  if (x.cols() != w.rows()) {
    throw DimensionError("propagate: features " + x.value().shape() + " vs weights " + w.value().shape());
  }
  Tensor h = matmul(graph, matmul(x, w));
  return act == Activation::relu ? relu(h) : h;
}

}  // namespace detail

/// One GCN layer on a fixed normalized adjacency (bound to the tape as a constant).
inline Tensor gcn_forward(const GraphConvLayer& layer, const Tensor& norm_adj, const Tensor& x) {
  return detail::propagate(norm_adj, x, x.tape().parameter(layer.weight), layer.activation);
}

/// One GLCN layer on a learned row-stochastic graph.
inline Tensor glcn_forward(const GraphConvLayer& layer, const Tensor& graph, const Tensor& x) {
  require_row_stochastic(graph.value());
  return detail::propagate(graph, x, x.tape().parameter(layer.weight), layer.activation);
}

/// softmax(G x W), row-wise.
inline Tensor perceptron_layer(const Tensor& graph, const Tensor& x, const Tensor& w) {
  return row_softmax(detail::propagate(graph, x, w, Activation::none));
}

}  // namespace glcn
