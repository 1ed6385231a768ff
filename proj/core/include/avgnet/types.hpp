#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace avgnet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Deterministic map on a finite-dimensional real space.
using VecMap = std::function<Vec(const Vec&)>;

// Thrown for inputs that violate an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical procedure cannot produce a result (non-finite
// values, unbounded problems, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool AllFinite(const Vec& v) { return v.allFinite(); }

inline void RequireSameDim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" +
                       std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()) + ")");
  }
}

}  // namespace avgnet
