#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hpmg {

// Invalid mesh topology or geometry (orientation, degenerate element,
// non-manifold edge).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mesh pair that is not parent/child in one refinement step.
class LineageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by the iterative solver when the iteration cap is hit. Carries the
// estimator history so callers can see whether it was stalling or diverging.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::vector<double> zeta_history)
      : std::runtime_error(what), zeta_history_(std::move(zeta_history)) {}

  const std::vector<double>& zeta_history() const { return zeta_history_; }

 private:
  std::vector<double> zeta_history_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hpmg
