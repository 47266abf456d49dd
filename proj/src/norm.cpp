#include "medial/norm.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace medial {

namespace {

void require_dim(long dim) {
  if (dim != 2 && dim != 3) throw InvalidInput("norm dimension must be 2 or 3");
}

void require_spd(const Mat& m) {
  require_dim(m.rows());
  if (m.rows() != m.cols()) throw InvalidInput("metric must be square");
  if (!m.allFinite()) throw InvalidInput("metric has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("metric must be symmetric");
  }
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw InvalidInput("metric must be positive definite");
}

}  // namespace

Norm::Norm(Kind kind, Mat metric, Vec drift)
    : kind_(kind), metric_(std::move(metric)), drift_(std::move(drift)) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(metric_);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (kind_ == Kind::Randers) drift_dual_ = std::sqrt(drift_.dot(metric_.llt().solve(drift_)));
  // |<b, v>| <= |b|_* |v|_M bounds the drift against the quadratic part.
  lower_ = (1.0 - drift_dual_) * std::sqrt(lmin);
  upper_ = (1.0 + drift_dual_) * std::sqrt(lmax);
}

Norm Norm::euclidean(int dim) {
  require_dim(dim);
  return Norm(Kind::Euclidean, Mat::Identity(dim, dim), Vec::Zero(dim));
}

Norm Norm::quadratic(const Mat& metric) {
  require_spd(metric);
  return Norm(Kind::Quadratic, metric, Vec::Zero(metric.rows()));
}

Norm Norm::randers(const Mat& metric, const Vec& drift) {
  require_spd(metric);
  if (drift.size() != metric.rows()) throw InvalidInput("drift dimension mismatch");
  if (!drift.allFinite()) throw InvalidInput("drift has non-finite entries");
  const double dual = std::sqrt(drift.dot(metric.llt().solve(drift)));
  if (dual >= 1.0 - 1e-9) throw InvalidInput("Randers drift must have dual norm < 1");
  return Norm(Kind::Randers, metric, drift);
}

Covector differential(const Norm& norm, const Vec& v) {
  if (v.size() != norm.dim()) throw InvalidInput("vector dimension mismatch");
  const Vec mv = norm.metric() * v;
  const double alpha = std::sqrt(v.dot(mv));
  if (!(alpha > 0.0)) throw InvalidInput("differential undefined at the zero vector");
  return {mv / alpha + norm.drift()};
}

Mat fundamental_matrix(const Norm& norm, const Vec& y) {
  if (y.size() != norm.dim()) throw InvalidInput("vector dimension mismatch");
  const Mat& m = norm.metric();
  const Vec my = m * y;
  const double alpha = std::sqrt(y.dot(my));
  if (!(alpha > 0.0)) throw InvalidInput("fundamental form undefined at the zero vector");
  const Vec ell = my / alpha;
  const Vec grad = ell + norm.drift();
  const double f = alpha + norm.drift().dot(y);
  // Hessian of F^2/2 = F * Hess F + dF dF^T, with Hess F = (M - l l^T) / alpha.
  const Mat hess = (m - ell * ell.transpose()) / alpha;
  return f * hess + grad * grad.transpose();
}

double fundamental_form(const Norm& norm, const Vec& y, const Vec& u, const Vec& v) {
  return u.dot(fundamental_matrix(norm, y) * v);
}

}  // namespace medial
