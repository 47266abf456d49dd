#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "medial/gallery.hpp"

namespace medial {

namespace {

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec d = b - a;
  const double t = std::clamp(d.dot(p - a) / d.squaredNorm(), 0.0, 1.0);
  return (p - a - t * d).norm();
}

// r phi(y / r), written so that it is exactly |y| once |y| >= r.
double softened_abs(double y, double r) {
  if (std::abs(y) >= r) return std::abs(y);
  return r * cantor_phi(y / r);
}

}  // namespace

double cantor_phi(double y) {
  const double a = std::abs(y);
  if (a >= 1.0) return a;
  const double y2 = y * y;
  return -y2 * y2 / 8.0 + 0.75 * y2 + 0.375;
}

std::vector<std::pair<double, double>> cantor_intervals(double sigma, int depth) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidInput("sigma must lie in (0, 1)");
  if (depth < 1 || depth > 12) throw InvalidInput("depth must lie in [1, 12]");
  std::vector<std::pair<double, double>> alive{{0.0, 1.0}}, removed;
  for (int j = 1; j <= depth; ++j) {
    std::vector<std::pair<double, double>> next;
    for (const auto& [l, r] : alive) {
      const double len = sigma * (r - l);
      const double m = 0.5 * (l + r);
      removed.emplace_back(m - 0.5 * len, m + 0.5 * len);
      next.emplace_back(l, m - 0.5 * len);
      next.emplace_back(m + 0.5 * len, r);
    }
    alive = std::move(next);
  }
  std::sort(removed.begin(), removed.end());
  return removed;
}

ConvexFn cantor_convex(double sigma, int depth) {
  auto removed = std::make_shared<const std::vector<std::pair<double, double>>>(
      cantor_intervals(sigma, depth));
  // u - x^2/2: |y| on C x R, softened inside removed intervals and outside [0, 1].
  auto kink = [removed](const Vec& p) {
    const double x = p(0), y = p(1);
    if (x < 0.0) return softened_abs(y, x * x);
    if (x > 1.0) return softened_abs(y, (x - 1) * (x - 1));
    auto it = std::upper_bound(removed->begin(), removed->end(), std::pair{x, 2.0});
    if (it != removed->begin()) {
      const auto& [a, b] = *std::prev(it);
      if (x > a && x < b) return softened_abs(y, (x - a) * (x - a) * (x - b) * (x - b));
    }
    return std::abs(y);
  };
  auto distance = [removed](const Vec& p) {
    const double x = p(0);
    double dx = 0.0;
    if (x < 0.0) {
      dx = -x;
    } else if (x > 1.0) {
      dx = x - 1.0;
    } else {
      auto it = std::upper_bound(removed->begin(), removed->end(), std::pair{x, 2.0});
      if (it != removed->begin()) {
        const auto& [a, b] = *std::prev(it);
        if (x > a && x < b) dx = std::min(x - a, b - x);
      }
    }
    return std::hypot(dx, p(1));
  };
  ConvexFn fn;
  fn.name = "cantor";
  fn.kink = kink;
  fn.eval = [kink](const Vec& p) { return 0.5 * p(0) * p(0) + kink(p); };
  fn.distance_to_singular = distance;
  fn.depth = depth;
  fn.window = {vec2(-0.25, -1.0), vec2(1.25, 1.0)};
  fn.lipschitz = 1.25 + 2.0;
  // Deeper intervals have length sigma L_depth and r <= (length / 2)^4.
  const double next_len = sigma * std::pow((1.0 - sigma) / 2.0, depth);
  fn.truncation_error = 0.375 * std::pow(next_len / 2.0, 4);
  fn.description = "C_sigma x {0}, sigma = " + std::to_string(sigma) + ", " +
                   std::to_string(removed->size()) + " removed intervals";
  return fn;
}

std::vector<Segment> zigzag_segments(int j_max) {
  std::vector<Segment> out;
  auto p = [](int j) { return vec2(std::ldexp(1.0, -j), 0.0); };
  auto q = [](int j) { return vec2(std::ldexp(1.0, -j), std::ldexp(1.0, -j)); };
  auto reflect = [](const Vec& v) { return vec2(-v(0), v(1)); };
  for (int j = 0; static_cast<int>(out.size()) < j_max; ++j) {
    const Segment a{p(j + 1), q(j)}, b{q(j), p(j + 2)};
    for (const Segment& s : {a, Segment{reflect(a.a), reflect(a.b)}, b,
                             Segment{reflect(b.a), reflect(b.b)}}) {
      if (static_cast<int>(out.size()) < j_max) out.push_back(s);
    }
  }
  return out;
}

ConvexFn zigzag_convex(int j_max) {
  if (j_max < 4) throw InvalidInput("zigzag needs j_max >= 4");
  auto segs = std::make_shared<const std::vector<Segment>>(zigzag_segments(j_max));
  ConvexFn fn;
  fn.name = "zigzag";
  fn.eval = [segs](const Vec& p) {
    double u = p.norm();
    double w = 1.0;
    for (const Segment& s : *segs) {
      w *= 0.5;
      u += w * segment_distance(p, s.a, s.b);
    }
    return u;
  };
  fn.kink = fn.eval;
  fn.distance_to_singular = [segs](const Vec& p) {
    double d = p.norm();
    for (const Segment& s : *segs) d = std::min(d, segment_distance(p, s.a, s.b));
    return d;
  };
  fn.depth = j_max;
  fn.window = {vec2(-0.5, -0.5), vec2(0.5, 0.5)};
  fn.lipschitz = 2.0;
  // d(K_j, p) <= |p| + sqrt(2) since K lies in the unit square.
  fn.truncation_error = std::ldexp(1.0, -j_max) * (std::sqrt(0.5) + std::sqrt(2.0));
  fn.description = "origin plus " + std::to_string(j_max) + " zigzag segments";
  return fn;
}

double probe_kink(const ConvexFn& fn, const Vec& x, const ProbeOptions& options) {
  const auto& g = fn.kink ? fn.kink : fn.eval;
  const double s1 = options.steps[0], s2 = options.steps[1];
  const double g0 = g(x);
  auto extrapolated = [&](const Vec& v) {
    const double d1 = (g(x + s1 * v) - g0) / s1;
    const double d2 = (g(x + s2 * v) - g0) / s2;
    return (s1 * d2 - s2 * d1) / (s1 - s2);
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < options.n_dirs; ++i) {
    const double t = std::numbers::pi * i / options.n_dirs;
    const Vec v = vec2(std::cos(t), std::sin(t));
    worst = std::max(worst, extrapolated(v) + extrapolated(Vec(-v)));
  }
  return worst;
}

bool convex_singular_probe(const ConvexFn& fn, const Vec& x, const ProbeOptions& options) {
  return probe_kink(fn, x, options) > options.tol;
}

SemiconcavityReport semiconcavity_check(const std::function<double(const Vec&)>& u,
                                        const Vec& center, double radius, double c,
                                        int n_triples, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), lam(0.0, 1.0);
  auto sample = [&] {
    Vec z(center.size());
    do {
      for (int i = 0; i < z.size(); ++i) z(i) = unit(rng);
    } while (z.squaredNorm() > 1.0);
    return Vec(center + radius * z);
  };
  SemiconcavityReport report;
  for (int n = 0; n < n_triples; ++n) {
    const Vec x0 = sample(), x1 = sample();
    const double l = lam(rng);
    const double u0 = u(x0), u1 = u(x1), um = u(Vec(l * x1 + (1 - l) * x0));
    const double excess =
        l * u1 + (1 - l) * u0 - um - c * l * (1 - l) * (x1 - x0).squaredNorm();
    const double slack = 1e-12 + 1e-14 * (std::abs(u0) + std::abs(u1) + std::abs(um));
    ++report.checked;
    report.worst_excess = std::max(report.worst_excess, excess);
    if (excess > slack) {
      report.pass = false;
      report.violators.emplace_back(x0, x1, l, excess);
    }
  }
  return report;
}

}  // namespace medial
