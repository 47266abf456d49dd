#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace medial {

// Points and vectors live in R^2 or R^3. The fixed upper bound keeps them on
// the stack while the dimension stays a runtime property of the scene.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

/// Raised when a computation cannot produce a trustworthy result
/// (degenerate geometry, non-convergence). Callers map it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on violated preconditions and malformed input. Exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace medial
