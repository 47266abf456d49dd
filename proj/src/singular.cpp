#include "medial/singular.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "medial/parallel.hpp"

namespace medial {

namespace {

int centered_rank(const Eigen::MatrixXd& rows, double tol) {
  if (rows.rows() <= 1) return 0;
  const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto& sv = svd.singularValues();
  const double scale = std::max(sv.size() ? sv(0) : 0.0, rows.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > tol * scale;
  return rank;
}

struct GridShape {
  int dim;
  std::array<int, 3> cells{};
  std::array<long, 3> stride{};
  long nodes = 1;

  GridShape(const Box& w, double h, int d) : dim(d) {
    for (int a = 0; a < 3; ++a) cells[a] = 0;
    for (int a = 0; a < d; ++a) {
      cells[a] = static_cast<int>(std::llround((w.hi(a) - w.lo(a)) / h));
      if (cells[a] < 1) throw InvalidInput("scan window smaller than one cell");
    }
    // Node (i, j, k) -> i * stride0 + j * stride1 + k; last axis fastest.
    long s = 1;
    for (int a = d - 1; a >= 0; --a) {
      stride[a] = s;
      s *= cells[a] + 1;
    }
    for (int a = d; a < 3; ++a) stride[a] = 0;
    nodes = s;
  }

  std::array<int, 3> unflatten(long n) const {
    std::array<int, 3> idx{};
    for (int a = 0; a < dim; ++a) {
      idx[a] = static_cast<int>(n / stride[a]);
      n %= stride[a];
    }
    return idx;
  }
};

Vec node_point(const OracleGrid& g, const std::array<int, 3>& idx) {
  Vec p = g.window.lo;
  for (int a = 0; a < g.dim; ++a) p(a) += g.h * idx[a];
  return p;
}

Vec cell_center(const OracleGrid& g, const std::array<int, 3>& idx) {
  Vec p = node_point(g, idx);
  return p.array() + 0.5 * g.h;
}

// Corners of a cell as offsets bitmask: bit a set means +1 along axis a.
std::vector<Vec> cell_corners(const OracleGrid& g, const std::array<int, 3>& idx) {
  std::vector<Vec> out;
  for (int mask = 0; mask < (1 << g.dim); ++mask) {
    auto c = idx;
    for (int a = 0; a < g.dim; ++a) c[a] += (mask >> a) & 1;
    out.push_back(node_point(g, c));
  }
  return out;
}

template <class Near>
int count_clusters(const Norm& norm, const std::vector<Vec>& pts, double threshold, Near&& reps) {
  for (const Vec& q : pts) {
    bool found = false;
    for (const Vec& r : reps) {
      if (dist_max(norm, q, r) <= threshold) {
        found = true;
        break;
      }
    }
    if (!found) reps.push_back(q);
  }
  return static_cast<int>(reps.size());
}

// Largest separation between the tie sets of two nodes. A node sitting
// exactly on a bisector carries both nearest points, so both neighboring
// cells are flagged and the flagged set keeps the scene's symmetry.
double set_jump(const Norm& norm, const NearestSet& a, const NearestSet& b) {
  double j = 0.0;
  for (int i = 0; i < a.count; ++i)
    for (int k = 0; k < b.count; ++k) j = std::max(j, dist_max(norm, a.points[i], b.points[k]));
  return j;
}

}  // namespace

std::optional<SingularSample> classify(const Scene& scene, const Vec& p,
                                       const ClassifyOptions& options) {
  ProjectionSet proj = project(scene, p, options.projection);
  if (proj.clusters.size() < 2 && !proj.overflow) return std::nullopt;
  SingularSample s;
  s.point = p;
  s.k = proj.overflow ? kOverflowMultiplicity : static_cast<int>(proj.clusters.size());
  const Norm& norm = scene.norm();
  std::vector<Covector> covs;
  for (size_t a = 0; a < proj.clusters.size(); ++a) {
    covs.push_back(proj.clusters[a].covector);
    for (size_t b = a + 1; b < proj.clusters.size(); ++b) {
      s.rad = std::max(s.rad, dist_max(norm, proj.clusters[a].representative,
                                       proj.clusters[b].representative));
    }
  }
  s.conv_dim = conv_dim(covs, options.conv_tol);
  s.projection = std::move(proj);
  return s;
}

double rad_of_region(std::span<const SingularSample> samples) {
  if (samples.empty()) throw InvalidInput("rad_of_region needs at least one sample");
  double r = 0.0;
  for (const auto& s : samples) r = std::max(r, s.rad);
  return r;
}

int conv_dim(std::span<const Covector> covectors, double tol) {
  if (covectors.empty()) throw InvalidInput("conv_dim needs at least one covector");
  Eigen::MatrixXd rows(covectors.size(), covectors.front().components.size());
  for (size_t i = 0; i < covectors.size(); ++i) rows.row(i) = covectors[i].components.transpose();
  return centered_rank(rows, tol);
}

int affine_rank(std::span<const Vec> points, double tol) {
  if (points.empty()) throw InvalidInput("affine_rank needs at least one point");
  Eigen::MatrixXd rows(points.size(), points.front().size());
  for (size_t i = 0; i < points.size(); ++i) rows.row(i) = points[i].transpose();
  return centered_rank(rows, tol);
}

OracleGrid oracle_scan(const Scene& scene, const Box& window, double h,
                       const OracleOptions& options) {
  const int dim = scene.dim();
  if (window.lo.size() != dim || window.hi.size() != dim) {
    throw InvalidInput("scan window dimension mismatch");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("grid spacing must be > 0");
  if (!(options.c_jump > 0.0)) throw InvalidInput("c_jump must be > 0");
  const GridShape shape(window, h, dim);

  OracleGrid grid;
  grid.window = window;
  grid.h = h;
  grid.dim = dim;
  grid.cells = shape.cells;
  grid.threshold = options.c_jump * h;
  grid.window.hi = window.lo;
  for (int a = 0; a < dim; ++a) grid.window.hi(a) += h * shape.cells[a];

  std::vector<NearestSet> near(shape.nodes);
  parallel_for(shape.nodes, [&](long n) { near[n] = nearest_set(scene, node_point(grid, shape.unflatten(n))); });
  for (long n = 0; n < shape.nodes; ++n) {
    if (near[n].distance < 2 * h) throw InvalidInput("scan window must stay 2h away from N");
  }

  const Norm& norm = scene.norm();
  std::array<long, 3> corner_count{};
  long total_cells = 1;
  for (int a = 0; a < dim; ++a) total_cells *= shape.cells[a];
  for (int a = 0; a < 3; ++a) corner_count[a] = a < dim ? shape.cells[a] : 1;

  for (long c = 0; c < total_cells; ++c) {
    std::array<int, 3> idx{};
    long rest = c;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % corner_count[a]);
      rest /= corner_count[a];
    }
    long base = 0;
    for (int a = 0; a < dim; ++a) base += idx[a] * shape.stride[a];
    double jump = 0.0;
    for (int mask = 0; mask < (1 << dim); ++mask) {
      long u = base;
      for (int a = 0; a < dim; ++a) u += ((mask >> a) & 1) * shape.stride[a];
      for (int a = 0; a < dim; ++a) {
        if ((mask >> a) & 1) continue;
        const long v = u + shape.stride[a];
        jump = std::max(jump, set_jump(norm, near[u], near[v]));
      }
    }
    if (jump <= grid.threshold) continue;
    OracleCell cell;
    cell.index = idx;
    cell.center = cell_center(grid, idx);
    cell.jump = jump;
    std::vector<Vec> pts;
    for (int mask = 0; mask < (1 << dim); ++mask) {
      long u = base;
      for (int a = 0; a < dim; ++a) u += ((mask >> a) & 1) * shape.stride[a];
      for (int i = 0; i < near[u].count; ++i) pts.push_back(near[u].points[i]);
    }
    std::vector<Vec> reps;
    cell.corner_clusters = count_clusters(norm, pts, grid.threshold, reps);
    grid.flagged.push_back(std::move(cell));
  }
  return grid;
}

std::optional<SingularSample> refine_cell(const Scene& scene, const OracleGrid& grid,
                                          const OracleCell& cell, const ClassifyOptions& options) {
  const Norm& norm = scene.norm();
  const std::vector<Vec> corners = cell_corners(grid, cell.index);
  std::vector<NearestSet> near;
  for (const Vec& c : corners) near.push_back(nearest_set(scene, c));
  int best_u = -1, best_v = -1;
  double best = grid.threshold;
  for (int u = 0; u < static_cast<int>(corners.size()); ++u) {
    for (int a = 0; a < grid.dim; ++a) {
      if ((u >> a) & 1) continue;
      const int v = u | (1 << a);
      const double j = set_jump(norm, near[u], near[v]);
      if (j > best) {
        best = j;
        best_u = u;
        best_v = v;
      }
    }
  }
  if (best_u < 0) return std::nullopt;
  // A corner that is itself a tie is already a singular point.
  for (int u : {best_u, best_v}) {
    if (set_jump(norm, near[u], near[u]) > grid.threshold) return classify(scene, corners[u], options);
  }
  Vec e0 = corners[best_u], e1 = corners[best_v];
  const Vec n0 = near[best_u].points[0];
  for (int it = 0; it < 60 && (e1 - e0).norm() > 1e-15 * (1.0 + e0.norm()); ++it) {
    const Vec mid = 0.5 * (e0 + e1);
    const Vec nm = nearest(scene, mid).point;
    if (dist_max(norm, nm, n0) <= 0.5 * grid.threshold) {
      e0 = mid;
    } else {
      e1 = mid;
    }
  }
  return classify(scene, Vec(0.5 * (e0 + e1)), options);
}

std::optional<SingularSample> refine_junction(const Scene& scene, const OracleGrid& grid,
                                              const OracleCell& cell,
                                              const ClassifyOptions& options) {
  const Norm& norm = scene.norm();
  std::vector<Vec> near;
  for (const Vec& c : cell_corners(grid, cell.index)) {
    const NearestSet ns = nearest_set(scene, c);
    for (int i = 0; i < ns.count; ++i) near.push_back(ns.points[i]);
  }
  std::vector<Vec> reps;
  if (count_clusters(norm, near, grid.threshold, reps) < 3) return std::nullopt;
  reps.resize(3);
  double sep = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) sep = std::min(sep, dist_max(norm, reps[a], reps[b]));
  std::vector<Scene> parts;
  for (const Vec& q : reps) {
    auto part = clip_by_ball(scene, q, sep / 4);
    if (!part) return std::nullopt;
    parts.push_back(std::move(*part));
  }
  auto residual = [&](const Vec& x) {
    const double da = distance_to(parts[0], x);
    return Eigen::Vector2d(da - distance_to(parts[1], x), da - distance_to(parts[2], x));
  };
  Vec x = cell.center;
  const int dim = grid.dim;
  const double step = 1e-7 * grid.h;
  for (int it = 0; it < 40; ++it) {
    const Eigen::Vector2d r = residual(x);
    if (r.norm() < 1e-14 * (1.0 + distance_to(parts[0], x))) break;
    Eigen::MatrixXd jac(2, dim);
    for (int a = 0; a < dim; ++a) {
      Vec e = Vec::Zero(dim);
      e(a) = step;
      jac.col(a) = (residual(x + e) - residual(x - e)) / (2 * step);
    }
    // Least-norm Newton step; in the plane this is the plain 2x2 solve.
    const Eigen::Matrix2d jjt = jac * jac.transpose();
    if (std::abs(jjt.determinant()) < 1e-24) return std::nullopt;
    const Eigen::VectorXd dx = jac.transpose() * jjt.inverse() * r;
    x -= dx;
    if (!x.allFinite() || (x - cell.center).norm() > 4 * grid.h * std::sqrt(dim)) return std::nullopt;
  }
  auto s = classify(scene, x, options);
  if (!s || s->k < 3) return std::nullopt;
  return s;
}

std::vector<SingularSample> refine_flagged(const Scene& scene, const OracleGrid& grid,
                                           const ClassifyOptions& options) {
  const long n = static_cast<long>(grid.flagged.size());
  std::vector<std::optional<SingularSample>> edge(n), junction(n);
  parallel_for(n, [&](long i) {
    edge[i] = refine_cell(scene, grid, grid.flagged[i], options);
    if (grid.flagged[i].corner_clusters >= 3) {
      junction[i] = refine_junction(scene, grid, grid.flagged[i], options);
    }
  });
  std::vector<SingularSample> out;
  for (long i = 0; i < n; ++i) {
    if (edge[i]) out.push_back(std::move(*edge[i]));
    if (junction[i]) out.push_back(std::move(*junction[i]));
  }
  return out;
}

double distance_to_flagged(const OracleGrid& grid, const Vec& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const OracleCell& c : grid.flagged) {
    const Box b{c.center.array() - 0.5 * grid.h, c.center.array() + 0.5 * grid.h};
    best = std::min(best, b.distance(p));
  }
  return best;
}

}  // namespace medial
