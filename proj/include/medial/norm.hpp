#pragma once

#include <algorithm>
#include <cmath>

#include "medial/types.hpp"

namespace medial {

/// A linear functional on R^m. Kept distinct from Vec so that vectors and
/// covectors cannot be mixed up silently.
struct Covector {
  Vec components;

  double operator()(const Vec& v) const { return components.dot(v); }
  Covector operator-(const Covector& o) const { return {components - o.components}; }
};

/// Translation-invariant Minkowski norm on R^m, m in {2, 3}:
///
///   F(v) = sqrt(v^T M v) + <b, v>
///
/// Euclidean is M = I, b = 0; Quadratic has b = 0; Randers carries a drift
/// covector b whose M-dual norm is below one. F is asymmetric whenever b != 0,
/// so dist(p, q) = F(q - p) and dist(q, p) generally differ.
class Norm {
 public:
  enum class Kind { Euclidean, Quadratic, Randers };

  static Norm euclidean(int dim);
  /// Throws InvalidInput unless `metric` is symmetric positive definite.
  static Norm quadratic(const Mat& metric);
  /// Throws InvalidInput if `metric` is not SPD or if the dual norm of
  /// `drift` is >= 1 - 1e-9.
  static Norm randers(const Mat& metric, const Vec& drift);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(metric_.rows()); }
  const Mat& metric() const { return metric_; }
  const Vec& drift() const { return drift_; }
  /// sqrt(b^T M^{-1} b); zero unless Randers.
  double drift_dual_norm() const { return drift_dual_; }

  double operator()(const Vec& v) const {
    return std::sqrt(v.dot(metric_ * v)) + drift_.dot(v);
  }

  /// Constants with lower_ratio()*|v| <= F(v) <= upper_ratio()*|v|.
  double lower_ratio() const { return lower_; }
  double upper_ratio() const { return upper_; }

  bool operator==(const Norm& o) const {
    return kind_ == o.kind_ && metric_ == o.metric_ && drift_ == o.drift_;
  }

 private:
  Norm(Kind kind, Mat metric, Vec drift);

  Kind kind_;
  Mat metric_;
  Vec drift_;
  double drift_dual_ = 0.0;
  double lower_ = 1.0;
  double upper_ = 1.0;
};

inline double eval(const Norm& norm, const Vec& v) { return norm(v); }

/// dF at v != 0. Zero-homogeneous, and satisfies dF_v(v) = F(v).
Covector differential(const Norm& norm, const Vec& v);

/// Matrix of g_y(u, v) = d^2/ds dt (F^2/2)(y + s u + t v) at s = t = 0.
Mat fundamental_matrix(const Norm& norm, const Vec& y);

double fundamental_form(const Norm& norm, const Vec& y, const Vec& u, const Vec& v);

/// Distance from p to q, i.e. the length F(q - p) of the straight segment.
inline double dist(const Norm& norm, const Vec& p, const Vec& q) { return norm(q - p); }

inline double dist_max(const Norm& norm, const Vec& p, const Vec& q) {
  const Vec d = q - p;
  return std::max(norm(d), norm(-d));
}

}  // namespace medial
