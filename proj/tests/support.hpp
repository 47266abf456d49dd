#pragma once

#include <random>

#include <Eigen/Cholesky>

#include "medial/norm.hpp"

namespace testing_support {

using medial::Mat;
using medial::Norm;
using medial::Vec;

inline Vec random_vec(std::mt19937_64& rng, int dim, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = u(rng);
  return v;
}

inline Mat random_spd(std::mt19937_64& rng, int dim) {
  Mat a(dim, dim);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = u(rng);
  Mat m = a * a.transpose() + 0.5 * Mat::Identity(dim, dim);
  return 0.5 * (m + m.transpose());
}

/// Random admissible norm; kind cycles with `which`.
inline Norm random_norm(std::mt19937_64& rng, int dim, int which) {
  switch (which % 3) {
    case 0:
      return Norm::euclidean(dim);
    case 1:
      return Norm::quadratic(random_spd(rng, dim));
    default: {
      const Mat m = random_spd(rng, dim);
      Vec b = random_vec(rng, dim);
      const double dual = std::sqrt(b.dot(m.llt().solve(b)));
      std::uniform_real_distribution<double> u(0.05, 0.9);
      b *= u(rng) / dual;
      return Norm::randers(m, b);
    }
  }
}

}  // namespace testing_support
