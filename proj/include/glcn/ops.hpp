#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "glcn/errors.hpp"
#include "glcn/matrix.hpp"
#include "glcn/tape.hpp"

// Differentiable operations over Tape tensors. Every op computes its value
// eagerly and records a backward rule that accumulates into its inputs.

namespace glcn {

namespace detail {

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  Matrix::require_same_shape(a.value(), b.value(), op);
}

// Softmax of one row, optionally weighted by a mask row. The max is taken
// over the mask support only.
inline void softmax_row(std::span<const double> in, std::span<const double> mask,
                        std::span<double> out, std::size_t row_index) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < in.size(); ++j)
    if (mask.empty() || mask[j] > 0.0) mx = std::max(mx, in[j]);
  if (mx == -std::numeric_limits<double>::infinity()) throw DegenerateRowError(row_index);
  double sum = 0.0;
  for (std::size_t j = 0; j < in.size(); ++j) {
    const double w = mask.empty() ? 1.0 : mask[j];
    out[j] = w > 0.0 ? w * std::exp(in[j] - mx) : 0.0;
    sum += out[j];
  }
  if (!(sum > 0.0)) throw DegenerateRowError(row_index);
  for (double& v : out) v /= sum;
}

}  // namespace detail

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: inner dimensions differ " + av.shape() + " x " + bv.shape());
  }
  Tape& t = a.tape();
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(glcn::matmul(av, bv), {a, b}, [&t, ia, ib](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) gemm(g, false, t.value(ib), true, *ga, true);
    if (Matrix* gb = grads.at(ib)) gemm(t.value(ia), true, g, false, *gb, true);
  });
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "add");
  Matrix out = a.value();
  out += b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) *ga += g;
    if (Matrix* gb = grads.at(ib)) *gb += g;
  });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "sub");
  Matrix out = a.value();
  const auto bv = b.value().values();
  auto ov = out.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] -= bv[k];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) *ga += g;
    if (Matrix* gb = grads.at(ib)) {
      auto d = gb->values();
      const auto s = g.values();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] -= s[k];
    }
  });
}

inline Tensor scale(const Tensor& a, double c) {
  Matrix out = a.value();
  for (double& v : out.values()) v *= c;
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, c](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) {
      auto d = ga->values();
      const auto s = g.values();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += c * s[k];
    }
  });
}

inline Tensor hadamard(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "hadamard");
  Matrix out = a.value();
  const auto bv = b.value().values();
  auto ov = out.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] *= bv[k];
  Tape& t = a.tape();
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(out), {a, b}, [&t, ia, ib](const Matrix& g, GradBuffer& grads) {
    const auto s = g.values();
    if (Matrix* ga = grads.at(ia)) {
      const auto other = t.value(ib).values();
      auto d = ga->values();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k] * other[k];
    }
    if (Matrix* gb = grads.at(ib)) {
      const auto other = t.value(ia).values();
      auto d = gb->values();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k] * other[k];
    }
  });
}

inline Tensor relu(const Tensor& a) {
  Matrix out = a.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  Tape& t = a.tape();
  const std::size_t ia = a.id();
  return t.record(std::move(out), {a}, [&t, ia](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) {
      const auto x = t.value(ia).values();
      const auto s = g.values();
      auto d = ga->values();
      for (std::size_t k = 0; k < d.size(); ++k)
        if (x[k] > 0.0) d[k] += s[k];
    }
  });
}

/// Elementwise max(x, floor); the gradient passes only where x > floor.
inline Tensor clamp_min(const Tensor& a, double floor) {
  Matrix out = a.value();
  for (double& v : out.values()) v = std::max(v, floor);
  Tape& t = a.tape();
  const std::size_t ia = a.id();
  return t.record(std::move(out), {a}, [&t, ia, floor](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) {
      const auto x = t.value(ia).values();
      const auto s = g.values();
      auto d = ga->values();
      for (std::size_t k = 0; k < d.size(); ++k)
        if (x[k] > floor) d[k] += s[k];
    }
  });
}

/// Natural log; every entry must be strictly positive.
inline Tensor log(const Tensor& a) {
  Matrix out = a.value();
  for (double& v : out.values()) {
    if (!(v > 0.0)) throw DomainError("log: non-positive entry " + std::to_string(v));
    v = std::log(v);
  }
  Tape& t = a.tape();
  const std::size_t ia = a.id();
  return t.record(std::move(out), {a}, [&t, ia](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) {
      const auto x = t.value(ia).values();
      const auto s = g.values();
      auto d = ga->values();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k] / x[k];
    }
  });
}

inline Tensor transpose(const Tensor& a) {
  const std::size_t ia = a.id();
  return a.tape().record(a.value().transposed(), {a}, [ia](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) *ga += g.transposed();
  });
}

/// n x m -> n x 1
inline Tensor row_sum(const Tensor& a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), 1);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double s = 0.0;
    for (double v : av.row(i)) s += v;
    out(i, 0) = s;
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) {
      for (std::size_t i = 0; i < ga->rows(); ++i)
        for (double& v : ga->row(i)) v += g(i, 0);
    }
  });
}

inline Tensor total_sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(Matrix(1, 1, s), {a}, [ia](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) {
      const double s0 = g(0, 0);
      for (double& v : ga->values()) v += s0;
    }
  });
}

/// Sum of squared entries.
inline Tensor frobenius_sq(const Tensor& a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v * v;
  Tape& t = a.tape();
  const std::size_t ia = a.id();
  return t.record(Matrix(1, 1, s), {a}, [&t, ia](const Matrix& g, GradBuffer& grads) {
    if (Matrix* ga = grads.at(ia)) {
      const double s0 = 2.0 * g(0, 0);
      const auto x = t.value(ia).values();
      auto d = ga->values();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += s0 * x[k];
    }
  });
}

namespace detail {

inline Tensor row_softmax_impl(const Tensor& a, const Matrix* mask) {
  const Matrix& av = a.value();
  if (mask) {
    Matrix::require_same_shape(av, *mask, "row_softmax mask");
    for (double w : mask->values())
      if (w < 0.0 || !std::isfinite(w)) throw DomainError("row_softmax: mask entries must be finite and nonnegative");
  }
  Matrix out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    detail::softmax_row(av.row(i), mask ? mask->row(i) : std::span<const double>{}, out.row(i), i);
  }
  Tape& t = a.tape();
  const std::size_t ia = a.id();
  // Output id is the next node; the rule reads the softmax output from it.
  const std::size_t io = t.size();
  return t.record(std::move(out), {a}, [&t, ia, io](const Matrix& g, GradBuffer& grads) {
    Matrix* ga = grads.at(ia);
    if (!ga) return;
    const Matrix& y = t.value(io);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      const auto yr = y.row(i);
      const auto gr = g.row(i);
      double dot = 0.0;
      for (std::size_t j = 0; j < yr.size(); ++j) dot += yr[j] * gr[j];
      auto dr = ga->row(i);
      for (std::size_t j = 0; j < yr.size(); ++j) dr[j] += yr[j] * (gr[j] - dot);
    }
  });
}

}  // namespace detail

/// Row-wise softmax with per-row max subtraction.
inline Tensor row_softmax(const Tensor& a) { return detail::row_softmax_impl(a, nullptr); }

/// Weighted softmax: out_ij = m_ij exp(a_ij) / sum_j m_ij exp(a_ij). The mask
/// is a constant nonnegative weight matrix; a row with no positive weight
/// raises DegenerateRowError.
inline Tensor row_softmax(const Tensor& a, const Matrix& mask) { return detail::row_softmax_impl(a, &mask); }

/// out_ij = relu(sum_k w_k |x_ik - x_jk|) for x [n x d], w [d x 1].
/// Symmetric with an exactly zero diagonal.
inline Tensor pairwise_abs_diff_project(const Tensor& x, const Tensor& w) {
  const Matrix& xv = x.value();
  const Matrix& wv = w.value();
  if (wv.rows() != xv.cols() || wv.cols() != 1) {
    throw DimensionError("pairwise_abs_diff_project: weights " + wv.shape() + " do not match features " +
                         xv.shape());
  }
  const std::size_t n = xv.rows(), d = xv.cols();
  Matrix out(n, n);
  const double* wp = wv.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = xv.data() + i * d;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* xj = xv.data() + j * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += wp[k] * std::abs(xi[k] - xj[k]);
      const double r = s > 0.0 ? s : 0.0;
      out(i, j) = r;
      out(j, i) = r;
    }
  }
  Tape& t = x.tape();
  const std::size_t ix = x.id(), iw = w.id();
  const std::size_t io = t.size();
  return t.record(std::move(out), {x, w}, [&t, ix, iw, io](const Matrix& g, GradBuffer& grads) {
    Matrix* gx = grads.at(ix);
    Matrix* gw = grads.at(iw);
    const Matrix& xv = t.value(ix);
    const Matrix& wv = t.value(iw);
    const Matrix& y = t.value(io);
    const std::size_t n = xv.rows(), d = xv.cols();
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = xv.data() + i * d;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!(y(i, j) > 0.0)) continue;
        const double gs = g(i, j) + g(j, i);
        if (gs == 0.0) continue;
        const double* xj = xv.data() + j * d;
        if (gw) {
          double* dw = gw->data();
          for (std::size_t k = 0; k < d; ++k) dw[k] += gs * std::abs(xi[k] - xj[k]);
        }
        if (gx) {
          double* dxi = gx->data() + i * d;
          double* dxj = gx->data() + j * d;
          for (std::size_t k = 0; k < d; ++k) {
            const double diff = xi[k] - xj[k];
            const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            const double v = gs * wv(k, 0) * sgn;
            dxi[k] += v;
            dxj[k] -= v;
          }
        }
      }
    }
  });
}

/// out_ij = ||x_i - x_j||^2. Symmetric with an exactly zero diagonal.
inline Tensor pairwise_sq_dist(const Tensor& x) {
  const Matrix& xv = x.value();
  const std::size_t n = xv.rows(), d = xv.cols();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = xv.data() + i * d;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* xj = xv.data() + j * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = xi[k] - xj[k];
        s += diff * diff;
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  Tape& t = x.tape();
  const std::size_t ix = x.id();
  return t.record(std::move(out), {x}, [&t, ix](const Matrix& g, GradBuffer& grads) {
    Matrix* gx = grads.at(ix);
    if (!gx) return;
    // dx = 2 (diag(rowsum(G)) x - G x) with G = g + g^T.
    const Matrix& xv = t.value(ix);
    const std::size_t n = xv.rows();
    Matrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sym(i, j) = g(i, j) + g(j, i);
    Matrix gxm = glcn::matmul(sym, xv);
    for (std::size_t i = 0; i < n; ++i) {
      double rs = 0.0;
      for (double v : sym.row(i)) rs += v;
      auto xr = xv.row(i);
      auto gr = gxm.row(i);
      auto dr = gx->row(i);
      for (std::size_t k = 0; k < dr.size(); ++k) dr[k] += 2.0 * (rs * xr[k] - gr[k]);
    }
  });
}

}  // namespace glcn
