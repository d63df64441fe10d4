#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "glcn/errors.hpp"
#include "glcn/matrix.hpp"

namespace glcn {

/// A named trainable matrix owned by a model. A Tape binds it to a leaf node
/// for one forward/backward pass.
struct Parameter {
  std::string name;
  Matrix value;
};

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
/// owning Tape is alive.
class Tensor {
 public:
  Tensor() = default;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const;
  bool requires_grad() const;
  /// Accumulated gradient of a leaf after Tape::backward.
  const Matrix& grad() const;

  std::size_t id() const noexcept { return id_; }
  Tape& tape() const noexcept { return *tape_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Scratch gradient storage handed to backward rules. `at(id)` is null for
/// nodes that do not require a gradient.
class GradBuffer {
 public:
  Matrix* at(std::size_t id);

 private:
  friend class Tape;
  GradBuffer(Tape& tape) : tape_(tape), grads_() {}

  Tape& tape_;
  std::vector<Matrix> grads_;
};

/// Define-by-run reverse-mode tape. Nodes are appended in evaluation order,
/// so the node list is always topologically sorted.
class Tape {
 public:
  /// Propagates the output gradient into the input slots of the buffer.
  using BackwardFn = std::function<void(const Matrix& out_grad, GradBuffer& grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor constant(Matrix value) { return push(std::move(value), false, true, {}); }

  /// Leaf whose gradient is accumulated by backward().
  Tensor variable(Matrix value) { return push(std::move(value), true, true, {}); }

  /// Leaf bound to a model parameter. Binding the same parameter twice
  /// returns the same node.
  Tensor parameter(const Parameter& p) {
    if (auto it = bound_.find(&p); it != bound_.end()) return {this, it->second};
    Tensor t = variable(p.value);
    bound_.emplace(&p, t.id_);
    return t;
  }

  /// Records an op result. The node requires a gradient iff any input does;
  /// otherwise the backward rule is dropped.
  Tensor record(Matrix value, const std::vector<Tensor>& inputs, BackwardFn fn) {
    bool needs = false;
    for (const auto& in : inputs) {
      if (in.tape_ != this) throw ContractError("tensor belongs to a different tape");
      needs = needs || nodes_[in.id_].requires_grad;
    }
    return push(std::move(value), needs, false, needs ? std::move(fn) : BackwardFn{});
  }

  const Matrix& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  const Matrix& grad(const Tensor& t) const {
    const Node& n = nodes_.at(t.id_);
    if (!n.leaf || !n.requires_grad) throw ContractError("gradient requested for a non-variable node");
    return n.grad;
  }

  const Matrix& grad(const Parameter& p) const {
    auto it = bound_.find(&p);
    if (it == bound_.end()) throw ContractError("parameter '" + p.name + "' is not bound to this tape");
    return nodes_[it->second].grad;
  }

  bool is_bound(const Parameter& p) const { return bound_.contains(&p); }

  void zero_grad() {
    for (auto& n : nodes_)
      if (n.leaf && n.requires_grad) n.grad.fill(0.0);
  }

  /// Accumulates d(loss)/d(leaf) into every variable leaf. Each node's rule
  /// runs at most once per call.
  void backward(const Tensor& loss) {
    if (loss.tape_ != this) throw ContractError("backward: loss belongs to a different tape");
    const Matrix& lv = nodes_[loss.id_].value;
    if (lv.rows() != 1 || lv.cols() != 1) {
      throw ContractError("backward: loss must be 1x1, got " + lv.shape());
    }
    if (!nodes_[loss.id_].requires_grad) return;

    GradBuffer buf(*this);
    buf.grads_.resize(loss.id_ + 1);
    buf.grads_[loss.id_] = Matrix(1, 1, 1.0);
    for (std::size_t id = loss.id_ + 1; id-- > 0;) {
      Node& n = nodes_[id];
      if (!n.requires_grad || buf.grads_[id].empty()) continue;
      if (n.leaf) {
        n.grad += buf.grads_[id];
      } else {
        n.backward(buf.grads_[id], buf);
      }
      buf.grads_[id] = Matrix{};  // intermediate no longer needed
    }
  }

 private:
  friend class GradBuffer;

  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    bool requires_grad = false;
    bool leaf = false;
  };

  Tensor push(Matrix value, bool requires_grad, bool leaf, BackwardFn fn) {
    Node n;
    if (leaf && requires_grad) n.grad = Matrix(value.rows(), value.cols());
    n.value = std::move(value);
    n.backward = std::move(fn);
    n.requires_grad = requires_grad;
    n.leaf = leaf;
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
  }

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> bound_;
};

inline Matrix* GradBuffer::at(std::size_t id) {
  if (!tape_.requires_grad(id)) return nullptr;
  Matrix& g = grads_.at(id);
  if (g.empty()) {
    const Matrix& v = tape_.value(id);
    g = Matrix(v.rows(), v.cols());
  }
  return &g;
}

inline const Matrix& Tensor::value() const { return tape_->value(id_); }
inline bool Tensor::requires_grad() const { return tape_->requires_grad(id_); }
inline const Matrix& Tensor::grad() const { return tape_->grad(*this); }
inline double Tensor::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("scalar(): tensor is " + v.shape());
  return v(0, 0);
}

}  // namespace glcn
