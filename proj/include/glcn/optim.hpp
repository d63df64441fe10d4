#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "glcn/errors.hpp"
#include "glcn/matrix.hpp"
#include "glcn/tape.hpp"

namespace glcn {

using Rng = std::mt19937_64;

/// Uniform on [-b, b], b = sqrt(6 / (rows + cols)).
inline Matrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) throw ConfigError("glorot_init: shape must be at least 1x1");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = dist(rng);
  return m;
}

struct AdamOptions {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment estimates for a fixed list of parameters.
class Adam {
 public:
  explicit Adam(std::vector<Parameter*> params, AdamOptions opts = {}) : params_(std::move(params)), opts_(opts) {
    if (!(opts_.lr > 0.0)) throw ConfigError("learning rate must be > 0");
    for (const Parameter* p : params_) {
      m_.emplace_back(p->value.rows(), p->value.cols());
      v_.emplace_back(p->value.rows(), p->value.cols());
    }
  }

  /// One bias-corrected update using the gradients accumulated on `tape`.
  void step(const Tape& tape) {
    std::vector<const Matrix*> grads;
    grads.reserve(params_.size());
    for (const Parameter* p : params_) grads.push_back(&tape.grad(*p));
    step(grads);
  }

  void step(std::span<const Matrix* const> grads) {
    if (grads.size() != params_.size()) throw DimensionError("adam: gradient count does not match parameter count");
    for (std::size_t k = 0; k < params_.size(); ++k) {
      Matrix::require_same_shape(params_[k]->value, *grads[k], "adam gradient");
      for (double g : grads[k]->values()) {
        if (std::isnan(g)) throw TrainingError("NaN gradient for parameter '" + params_[k]->name + "'", -1);
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto theta = params_[k]->value.values();
      auto m = m_[k].values();
      auto v = v_[k].values();
      const auto g = grads[k]->values();
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = opts_.beta1 * m[i] + (1.0 - opts_.beta1) * g[i];
        v[i] = opts_.beta2 * v[i] + (1.0 - opts_.beta2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        theta[i] -= opts_.lr * mhat / (std::sqrt(vhat) + opts_.eps);
      }
    }
  }

  long step_count() const noexcept { return t_; }
  const AdamOptions& options() const noexcept { return opts_; }
  const Matrix& first_moment(std::size_t k) const { return m_.at(k); }
  const Matrix& second_moment(std::size_t k) const { return v_.at(k); }

 private:
  std::vector<Parameter*> params_;
  AdamOptions opts_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long t_ = 0;
};

}  // namespace glcn
