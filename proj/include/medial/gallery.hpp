#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "medial/scene.hpp"

namespace medial {

// ---- Point and polygon scenes ------------------------------------------

/// N = {(+-1, 1/k) : 1 <= k <= k_max} u {(+-1, 0)}, Euclidean. The singular
/// set of the untruncated set is X u Y with X the lines y = a_k and Y the
/// y-axis.
struct BranchExample {
  Scene scene;
  int k_max;

  static double a(int k) { return 0.5 * (1.0 / k + 1.0 / (k + 1)); }
  /// Bound on how far the truncated singular set strays from X u Y:
  /// below y = 1/k_max the stacks are missing.
  double truncation_error() const { return 1.0 / k_max; }
  /// Euclidean distance to X u Y (all k).
  double distance_to_oracle(const Vec& p) const;
  /// Euclidean distance to the exact singular set of the truncated scene:
  /// Y, the lines y = a_k for k < k_max, and y = 1 / (2 k_max).
  double distance_to_truncated(const Vec& p) const;
  bool contains(const Vec& p, double tol = 1e-12) const { return distance_to_oracle(p) <= tol; }
};

BranchExample branch_example(int k_max = 64);

/// {(1, 0), (-1, 0)} under the given planar norm.
Scene two_point_scene(const Norm& norm = Norm::euclidean(2));

/// Three generic points; the singular set is three bisector rays meeting at
/// the circumcenter.
struct TriangleExample {
  Scene scene;
  std::array<Vec, 3> vertices;
  Vec circumcenter;

  /// Unit direction of the ray of points equidistant from vertices i, j.
  Vec bisector_direction(int i, int j) const;
  double distance_to_oracle(const Vec& p) const;
};

TriangleExample triangle_scene();

/// Boundary of the regular (k+1)-gon with circumradius 1, one vertex on the
/// positive x-axis. The medial axis is the union of spokes from the center
/// to the vertices; the center has multiplicity k+1.
struct PolygonExample {
  Scene scene;
  int k;
  std::vector<Vec> vertices;

  double distance_to_oracle(const Vec& p) const;
};

PolygonExample polygon_scene(int k);

/// A singular sample is simplicial when its cluster representatives span an
/// affine simplex of dimension k-1.
bool simplicial(const std::vector<Vec>& representatives, double tol = 1e-7);

// ---- Optimality domain ---------------------------------------------------

/// Positive root a of sqrt(a^2 + (2 - delta)^2) = 2 + delta, found by
/// bisection on the residual.
double solve_tangency(double delta);

/// One bump g_delta(x - x0) on the top (or, mirrored, bottom) boundary.
struct Bump {
  double x0;
  double a;
  double delta;
  bool top;
  /// Abscissa offset of the tangency between the central and side arcs.
  double b() const { return a * (1.0 + delta) / (2.0 + delta); }
};

struct OptimalityDomain {
  Scene scene;
  Scene top;
  Scene bottom;
  double epsilon;
  int stages;
  /// Removed open intervals J_i of the fat Cantor construction.
  std::vector<std::pair<double, double>> removed;
  std::vector<Bump> bumps;

  /// Analytic singular graph: sum of +-(x - x0 -+ a)^2 / 8 over bumps.
  double f(double x) const;
  /// Vertical distance |y - f(x)| for x in [0, 1], Euclidean distance to the
  /// graph's endpoints otherwise.
  double distance_to_oracle(const Vec& p) const;
  double removed_length() const;
};

/// Pre: epsilon in (0, 1), stages >= 1, bumps_per_side >= 1. Stage i removes
/// from each of the 2^(i-1) surviving intervals a centered interval of length
/// epsilon 4^-i. Each removed interval J = (l, l + L) receives bumps with
/// radius r_n = L 2^-(n+3), centers l + 3 r_n and l + L - 3 r_n, and a = r_n/2,
/// alternating between the top and bottom boundaries.
OptimalityDomain optimality_domain(double epsilon, int stages = 4, int bumps_per_side = 3);

/// Singular graph ordinate at x: root of d_top = d_bottom along the vertical.
double singular_height(const OptimalityDomain& dom, double x);

/// Derivative jump f'(x0+) - f'(x0-) measured on the constructed boundary by
/// one-sided three-point differences of singular_height with step s.
double measured_jump(const OptimalityDomain& dom, const Bump& bump, double s);

/// The same difference formula applied to the analytic f.
double oracle_jump(const OptimalityDomain& dom, const Bump& bump, double s);

// ---- Convex functions ------------------------------------------------------

struct ConvexFn {
  std::string name;
  std::function<double(const Vec&)> eval;
  /// eval minus a quadratic whose contribution to D+(v) + D+(-v) vanishes
  /// after step extrapolation. Probing this part avoids cancellation against
  /// a large smooth term.
  std::function<double(const Vec&)> kink;
  /// Euclidean distance to the (truncated) analytic singular set.
  std::function<double(const Vec&)> distance_to_singular;
  std::string description;
  int depth = 0;
  double lipschitz = 0.0;
  Box window;
  double truncation_error = 0.0;
};

/// C^2 even convex spline with phi(y) = |y| for |y| >= 1 and phi(0) = 3/8.
double cantor_phi(double y);

/// Removed intervals of the generalized Cantor set C_sigma up to `depth`.
std::vector<std::pair<double, double>> cantor_intervals(double sigma, int depth);

/// Pre: sigma in (0, 1), 1 <= depth <= 12.
ConvexFn cantor_convex(double sigma, int depth);

/// The segments K_1..K_{j_max} of the zigzag set (K_0 is the origin).
std::vector<Segment> zigzag_segments(int j_max);

/// u = |p| + sum_{j=1}^{j_max} 2^-j d(K_j, p). Pre: j_max >= 4.
ConvexFn zigzag_convex(int j_max = 24);

struct ProbeOptions {
  int n_dirs = 16;
  double tol = 1e-3;
  std::array<double, 2> steps{1e-4, 1e-5};
};

/// Singular iff the largest D+(x; v) + D+(x; -v) over n_dirs directions in
/// [0, pi) exceeds tol. One-sided quotients at the two steps are linearly
/// extrapolated to zero step.
bool convex_singular_probe(const ConvexFn& fn, const Vec& x, const ProbeOptions& options = {});

/// Largest extrapolated D+(v) + D+(-v) over the sampled directions.
double probe_kink(const ConvexFn& fn, const Vec& x, const ProbeOptions& options = {});

struct SemiconcavityReport {
  bool pass = true;
  int checked = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  /// (x0, x1, lambda, excess) for each violating triple.
  std::vector<std::tuple<Vec, Vec, double, double>> violators;
};

/// Samples triples in the Euclidean ball (center, radius) and checks
/// lambda u(x1) + (1-lambda) u(x0) - u(lambda x1 + (1-lambda) x0)
///   <= C lambda (1 - lambda) |x1 - x0|^2.
SemiconcavityReport semiconcavity_check(const std::function<double(const Vec&)>& u,
                                        const Vec& center, double radius, double c,
                                        int n_triples, unsigned long seed = 1);

}  // namespace medial
