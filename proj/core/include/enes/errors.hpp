#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace enes {

/// Input vector/matrix has the wrong shape or violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Cholesky factor with a zero or negative diagonal entry.
class SingularFactor : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The FIM inverse recurrence hit a non-positive Schur complement at group `k`.
/// This only happens when the precision matrix handed in is not positive definite.
class NumericalBreakdown : public std::runtime_error {
 public:
  NumericalBreakdown(int k, const std::string& what)
      : std::runtime_error(what), k_(k) {}
  int group() const noexcept { return k_; }

 private:
  int k_;
};

/// An objective returned NaN. `index` is the position of the offending
/// individual in the population (or raw fitness vector).
class InvalidFitness : public std::runtime_error {
 public:
  InvalidFitness(std::size_t index, const std::string& what)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace enes
