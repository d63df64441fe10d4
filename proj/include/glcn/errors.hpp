#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glcn {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (non-scalar backward seed,
/// non-stochastic graph, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A masked softmax row with no admissible entry.
class DegenerateRowError : public std::runtime_error {
 public:
  explicit DegenerateRowError(std::size_t row)
      : std::runtime_error("degenerate row " + std::to_string(row) +
                           ": every mask entry is zero"),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Invalid model, training or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent dataset/checkpoint files.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training could not continue (non-finite loss or gradient).
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int last_finite_epoch)
      : std::runtime_error(what), last_finite_epoch_(last_finite_epoch) {}

  int last_finite_epoch() const noexcept { return last_finite_epoch_; }

 private:
  int last_finite_epoch_;
};

}  // namespace glcn
