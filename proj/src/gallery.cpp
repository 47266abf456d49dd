#include "medial/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "medial/singular.hpp"

namespace medial {

namespace {

constexpr double kPi = std::numbers::pi;

double distance_to_segment(const Vec& p, const Vec& a, const Vec& b) {
  const Vec d = b - a;
  const double t = std::clamp(d.dot(p - a) / d.squaredNorm(), 0.0, 1.0);
  return (p - a - t * d).norm();
}

double distance_to_ray(const Vec& p, const Vec& origin, const Vec& dir) {
  const double t = std::max(0.0, dir.dot(p - origin));
  return (p - origin - t * dir).norm();
}

// Distance from y to the nearest of the heights a_k, k >= k_lo.
double nearest_branch_height(double y, int k_hi) {
  double best = std::numeric_limits<double>::infinity();
  if (y <= 0.0) return -y;  // a_k -> 0 from above
  const int k0 = static_cast<int>(std::floor(1.0 / y));
  for (int k = std::max(1, k0 - 3); k <= std::min(k_hi, k0 + 3); ++k) {
    best = std::min(best, std::abs(y - BranchExample::a(k)));
  }
  if (k0 - 3 > k_hi) best = std::min(best, std::abs(y - BranchExample::a(k_hi)));
  return best;
}

}  // namespace

double BranchExample::distance_to_oracle(const Vec& p) const {
  return std::min(std::abs(p(0)), nearest_branch_height(p(1), std::numeric_limits<int>::max() - 4));
}

double BranchExample::distance_to_truncated(const Vec& p) const {
  double d = std::abs(p(0));
  if (p(1) > 1.0 / k_max) {
    d = std::min(d, nearest_branch_height(p(1), k_max - 1));
  }
  d = std::min(d, std::abs(p(1) - 0.5 / k_max));
  d = std::min(d, std::abs(p(1) - a(k_max - 1)));
  return d;
}

BranchExample branch_example(int k_max) {
  if (k_max < 1) throw InvalidInput("branch example needs k_max >= 1");
  std::vector<Vec> pts{vec2(1, 0), vec2(-1, 0)};
  for (int k = 1; k <= k_max; ++k) {
    pts.push_back(vec2(1, 1.0 / k));
    pts.push_back(vec2(-1, 1.0 / k));
  }
  return {Scene(Norm::euclidean(2), {PointSet{pts}}), k_max};
}

Scene two_point_scene(const Norm& norm) {
  if (norm.dim() != 2) throw InvalidInput("two-point scene is planar");
  return Scene(norm, {PointSet{{vec2(1, 0), vec2(-1, 0)}}});
}

Vec TriangleExample::bisector_direction(int i, int j) const {
  const int k = 3 - i - j;
  const Vec e = vertices[j] - vertices[i];
  Vec n = vec2(-e(1), e(0)).normalized();
  // Along the ray |x - v_i|^2 - |x - v_k|^2 must decrease.
  if (n.dot(vertices[k] - vertices[i]) > 0) n = -n;
  return n;
}

double TriangleExample::distance_to_oracle(const Vec& p) const {
  return std::min({distance_to_ray(p, circumcenter, bisector_direction(0, 1)),
                   distance_to_ray(p, circumcenter, bisector_direction(1, 2)),
                   distance_to_ray(p, circumcenter, bisector_direction(0, 2))});
}

TriangleExample triangle_scene() {
  const std::array<Vec, 3> v{vec2(-1.0, -0.45), vec2(1.1, -0.3), vec2(0.15, 1.2)};
  // Circumcenter from |x - v0|^2 = |x - v1|^2 = |x - v2|^2 (two linear equations).
  Eigen::Matrix2d a;
  Eigen::Vector2d rhs;
  for (int r = 0; r < 2; ++r) {
    const Vec d = v[r + 1] - v[0];
    a.row(r) << 2 * d(0), 2 * d(1);
    rhs(r) = v[r + 1].squaredNorm() - v[0].squaredNorm();
  }
  const Eigen::Vector2d c = a.partialPivLu().solve(rhs);
  return {Scene(Norm::euclidean(2), {PointSet{{v[0], v[1], v[2]}}}), v, vec2(c(0), c(1))};
}

double PolygonExample::distance_to_oracle(const Vec& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& v : vertices) best = std::min(best, distance_to_segment(p, Vec::Zero(2), v));
  return best;
}

PolygonExample polygon_scene(int k) {
  if (k < 2) throw InvalidInput("polygon scene needs k >= 2");
  std::vector<Vec> verts;
  for (int m = 0; m <= k; ++m) {
    const double t = 2 * kPi * m / (k + 1);
    verts.push_back(vec2(std::cos(t), std::sin(t)));
  }
  std::vector<Vec> ring = verts;
  ring.push_back(verts.front());
  return {Scene(Norm::euclidean(2), {Polyline{ring}}), k, verts};
}

bool simplicial(const std::vector<Vec>& representatives, double tol) {
  if (representatives.empty()) return false;
  return affine_rank(representatives, tol) == static_cast<int>(representatives.size()) - 1;
}

// ---- Optimality domain ---------------------------------------------------

double solve_tangency(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw InvalidInput("tangency needs delta in (0, 1)");
  auto residual = [&](double a) { return std::hypot(a, 2.0 - delta) - (2.0 + delta); };
  double lo = 0.0, hi = 4.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double OptimalityDomain::f(double x) const {
  double v = 0.0;
  for (const Bump& b : bumps) {
    const double t = std::abs(x - b.x0);
    if (t >= b.a) continue;
    const double piece = (t - b.a) * (t - b.a) / 8.0;
    v += b.top ? piece : -piece;
  }
  return v;
}

double OptimalityDomain::distance_to_oracle(const Vec& p) const {
  if (p(0) >= 0.0 && p(0) <= 1.0) return std::abs(p(1) - f(p(0)));
  const double x = std::clamp(p(0), 0.0, 1.0);
  return (p - vec2(x, f(x))).norm();
}

double OptimalityDomain::removed_length() const {
  double total = 0.0;
  for (const auto& [l, r] : removed) total += r - l;
  return total;
}

namespace {

// Top-boundary pieces of one bump; the bottom version mirrors y -> -y.
void bump_arcs(const Bump& bump, std::vector<Primitive>& out) {
  const double a = bump.a, b = bump.b(), d = bump.delta;
  const double side = std::acos(a - b);
  const double phi = std::asin(b / (1.0 + d));
  if (bump.top) {
    out.push_back(CircularArc{vec2(bump.x0 - a, 2.0), 1.0, 1.5 * kPi, 2 * kPi - side});
    out.push_back(CircularArc{vec2(bump.x0, d), 1.0 + d, 0.5 * kPi - phi, 0.5 * kPi + phi});
    out.push_back(CircularArc{vec2(bump.x0 + a, 2.0), 1.0, kPi + side, 1.5 * kPi});
  } else {
    out.push_back(CircularArc{vec2(bump.x0 - a, -2.0), 1.0, side, 0.5 * kPi});
    out.push_back(CircularArc{vec2(bump.x0, -d), 1.0 + d, 1.5 * kPi - phi, 1.5 * kPi + phi});
    out.push_back(CircularArc{vec2(bump.x0 + a, -2.0), 1.0, 0.5 * kPi, kPi - side});
  }
}

std::vector<Primitive> boundary_side(const std::vector<Bump>& bumps, bool top) {
  std::vector<Bump> mine;
  for (const Bump& b : bumps)
    if (b.top == top) mine.push_back(b);
  std::sort(mine.begin(), mine.end(), [](const Bump& u, const Bump& v) { return u.x0 < v.x0; });
  const double y = top ? 1.0 : -1.0;
  std::vector<Primitive> out;
  double x = 0.0;
  for (const Bump& b : mine) {
    if (b.x0 - b.a > x) out.push_back(Segment{vec2(x, y), vec2(b.x0 - b.a, y)});
    bump_arcs(b, out);
    x = b.x0 + b.a;
  }
  if (x < 1.0) out.push_back(Segment{vec2(x, y), vec2(1.0, y)});
  return out;
}

}  // namespace

OptimalityDomain optimality_domain(double epsilon, int stages, int bumps_per_side) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
  if (stages < 1) throw InvalidInput("stages must be >= 1");
  if (bumps_per_side < 1) throw InvalidInput("bumps_per_side must be >= 1");
  std::vector<std::pair<double, double>> alive{{0.0, 1.0}}, removed;
  for (int i = 1; i <= stages; ++i) {
    const double len = epsilon * std::pow(4.0, -i);
    std::vector<std::pair<double, double>> next;
    for (const auto& [l, r] : alive) {
      const double m = 0.5 * (l + r);
      removed.emplace_back(m - 0.5 * len, m + 0.5 * len);
      next.emplace_back(l, m - 0.5 * len);
      next.emplace_back(m + 0.5 * len, r);
    }
    alive = std::move(next);
  }
  std::sort(removed.begin(), removed.end());

  std::vector<Bump> bumps;
  for (const auto& [l, r] : removed) {
    const double len = r - l;
    for (int n = 0; n < bumps_per_side; ++n) {
      const double rn = len * std::pow(2.0, -(n + 3));
      const double a = 0.5 * rn;
      const double delta = a * a / 8.0;
      bumps.push_back({l + 3 * rn, a, delta, n % 2 == 0});
      bumps.push_back({r - 3 * rn, a, delta, n % 2 != 0});
    }
  }

  std::vector<Primitive> top = boundary_side(bumps, true);
  std::vector<Primitive> bottom = boundary_side(bumps, false);
  std::vector<Primitive> all = top;
  all.insert(all.end(), bottom.begin(), bottom.end());
  all.push_back(CircularArc{vec2(0, 0), 1.0, 0.5 * kPi, 1.5 * kPi});
  all.push_back(CircularArc{vec2(1, 0), 1.0, -0.5 * kPi, 0.5 * kPi});
  const Norm e = Norm::euclidean(2);
  return {Scene(e, all), Scene(e, top), Scene(e, bottom), epsilon, stages, removed, bumps};
}

double singular_height(const OptimalityDomain& dom, double x) {
  auto g = [&](double y) {
    const Vec p = vec2(x, y);
    return distance_to(dom.top, p) - distance_to(dom.bottom, p);
  };
  double lo = -0.9, hi = 0.9;  // g(lo) > 0 > g(hi)
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

template <class H>
double three_point_jump(H&& h, double x0, double s) {
  const double y0 = h(x0);
  const double right = (-3 * y0 + 4 * h(x0 + s) - h(x0 + 2 * s)) / (2 * s);
  const double left = (3 * y0 - 4 * h(x0 - s) + h(x0 - 2 * s)) / (2 * s);
  return right - left;
}

}  // namespace

double measured_jump(const OptimalityDomain& dom, const Bump& bump, double s) {
  return three_point_jump([&](double x) { return singular_height(dom, x); }, bump.x0, s);
}

double oracle_jump(const OptimalityDomain& dom, const Bump& bump, double s) {
  return three_point_jump([&](double x) { return dom.f(x); }, bump.x0, s);
}

}  // namespace medial
