#include "medial/propagate.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

namespace medial {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Directions on the unit circle or a Fibonacci sphere.
std::vector<Vec> sample_directions(int dim, int n) {
  std::vector<Vec> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    if (dim == 2) {
      const double t = 2.0 * std::numbers::pi * j / n;
      out.push_back(vec2(std::cos(t), std::sin(t)));
    } else {
      const double z = 1.0 - (2.0 * j + 1.0) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = j * std::numbers::pi * (3.0 - std::sqrt(5.0));
      out.push_back(vec3(r * std::cos(t), r * std::sin(t), z));
    }
  }
  return out;
}

bool in_parts(const ProjectionSet& proj, const std::vector<Scene>& parts) {
  if (proj.overflow) return false;
  for (const Cluster& c : proj.clusters) {
    bool found = false;
    for (const Scene& part : parts) {
      if (distance_to(part, c.representative) <= proj.sep) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Vec fd_gradient(const auto& f, const Vec& x, double eps) {
  Vec g(x.size());
  for (int a = 0; a < x.size(); ++a) {
    Vec xp = x, xm = x;
    xp[a] += eps;
    xm[a] -= eps;
    g[a] = (f(xp) - f(xm)) / (2.0 * eps);
  }
  return g;
}

// One branch of the 2D continuation, shared by both directions.
struct Tracer2 {
  const Scene& scene;
  const SplitPair& pair;
  const TraceOptions& opt;
  std::vector<Scene> parts;
  double h = 0.0;
  double radius = 0.0;

  double f(const Vec& x) const { return f_eval(pair, x); }
  Vec grad(const Vec& x) const {
    return fd_gradient([&](const Vec& y) { return f(y); }, x, h / 16.0);
  }

  // Damped Newton along the local gradient, staying within h of the start.
  bool newton(Vec& y, double& fy) const {
    const Vec start = y;
    fy = f(y);
    for (int it = 0; it < opt.newton_iterations && std::abs(fy) > opt.tol; ++it) {
      const Vec g = grad(y);
      const double g2 = g.squaredNorm();
      if (g2 < opt.eps_g * opt.eps_g) return false;
      Vec step = -fy * g / g2;
      bool improved = false;
      for (int d = 0; d < 12; ++d) {
        const Vec cand = y + step;
        const double fc = f(cand);
        if (std::abs(fc) < std::abs(fy)) {
          y = cand;
          fy = fc;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved || (y - start).norm() > h) return false;
    }
    return std::abs(fy) <= opt.tol;
  }

  // Bisection on the normal line through `center`, bracket of width h.
  bool bisect(const Vec& center, const Vec& normal, Vec& y, double& fy) const {
    Vec a = center - 0.5 * h * normal, b = center + 0.5 * h * normal;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) {
      y = a;
      fy = 0.0;
      return true;
    }
    if (fb == 0.0) {
      y = b;
      fy = 0.0;
      return true;
    }
    if ((fa > 0) == (fb > 0)) return false;
    for (int it = 0; it < 200; ++it) {
      const Vec m = 0.5 * (a + b);
      const double fm = f(m);
      if (std::abs(fm) <= opt.tol || (b - a).norm() < 1e-15) {
        y = m;
        fy = fm;
        return std::abs(fm) <= opt.tol;
      }
      if ((fm > 0) == (fa > 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return false;
  }

  bool correct(const Vec& pred, const Vec& normal, Vec& y, double& fy) const {
    y = pred;
    if (newton(y, fy)) return true;
    return bisect(pred, normal, y, fy);
  }

  // Appends vertices walking along `dir` from the seed; returns the reason.
  Termination run(const Vec& seed, const Vec& seed_grad, Vec dir, std::vector<Vec>& verts,
                  std::vector<double>& res, std::vector<double>& gm, long budget) const {
    Vec x = seed, g = seed_grad;
    for (long n = 0;; ++n) {
      if (n >= budget) return Termination::StepLimit;
      const double gn = g.norm();
      if (gn < opt.eps_g) return Termination::GradientDegenerate;
      Vec t = vec2(-g[1], g[0]) / gn;
      if (t.dot(dir) < 0) t = -t;
      const Vec normal = g / gn;
      bool accepted = false;
      Vec y;
      double fy = 0.0;
      for (double step = h; step >= 0.25 * h; step *= 0.5) {
        if (!correct(x + step * t, normal, y, fy)) continue;
        const double s = (y - x).norm();
        if (s >= 0.25 * h && s <= 2.0 * h && (y - x).dot(t) > 0) {
          accepted = true;
          break;
        }
      }
      if (!accepted) return Termination::CorrectorFailed;
      if ((y - pair.p).norm() > radius) return Termination::LeftBall;
      if (opt.window && !opt.window->contains(y)) return Termination::LeftWindow;
      if (opt.check_projection && !in_parts(project(scene, y), parts))
        return Termination::ProjectionEscaped;
      g = grad(y);
      verts.push_back(y);
      res.push_back(std::abs(fy));
      gm.push_back(g.norm());
      dir = y - x;
      x = y;
    }
  }
};

}  // namespace

SplitPair split(const Scene& scene, const SingularSample& sample) {
  if (sample.overflow() || sample.k != 2 || sample.projection.clusters.size() != 2)
    throw InvalidInput("split needs a sample with exactly two projection clusters");
  const Vec q1 = sample.projection.clusters[0].representative;
  const Vec q2 = sample.projection.clusters[1].representative;
  const double rad = dist_max(scene.norm(), q1, q2);
  if (!(rad > 0.0)) throw InvalidInput("split: coincident representatives");
  auto n1 = clip_by_ball(scene, q1, rad / 4.0);
  auto n2 = clip_by_ball(scene, q2, rad / 4.0);
  if (!n1 || !n2) throw NumericalError("split: representative not on N");
  SplitPair pair{std::move(*n1), std::move(*n2), q1, q2, sample.point, rad};
  return pair;
}

double f_eval(const SplitPair& pair, const Vec& x) {
  return distance_to(pair.n1, x) - distance_to(pair.n2, x);
}

double estimate_delta_parts(const Scene& scene, const Vec& p, double rad,
                            const std::vector<Scene>& parts, const DeltaOptions& options) {
  const double margin = distance_to(scene, p) / scene.norm().upper_ratio();
  const std::vector<Vec> dirs = sample_directions(scene.dim(), options.n_dirs);
  double r = rad;
  for (int halving = 1; halving <= options.max_halvings; ++halving) {
    r *= 0.5;
    if (!(r < margin)) continue;
    bool ok = true;
    for (int i = 0; i < options.n_radii && ok; ++i) {
      const double rho = r * (i + 1) / options.n_radii;
      for (const Vec& u : dirs) {
        if (!in_parts(project(scene, p + rho * u, options.projection), parts)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return 0.5 * r;
  }
  throw NumericalError("estimate_delta: no dyadic radius down to rad/2^" +
                       std::to_string(options.max_halvings) + " keeps projections in the split");
}

double estimate_delta(const Scene& scene, const SplitPair& pair, const DeltaOptions& options) {
  return estimate_delta_parts(scene, pair.p, pair.rad, {pair.n1, pair.n2}, options);
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Seed: return "seed";
    case Termination::LeftBall: return "left_ball";
    case Termination::LeftWindow: return "left_window";
    case Termination::GradientDegenerate: return "gradient_degenerate";
    case Termination::ProjectionEscaped: return "projection_escaped";
    case Termination::StepLimit: return "step_limit";
    case Termination::CorrectorFailed: return "corrector_failed";
  }
  return "unknown";
}

TracedArc trace_arc_2d(const Scene& scene, const SplitPair& pair, const TraceOptions& options) {
  if (scene.dim() != 2) throw InvalidInput("trace_arc_2d needs a planar scene");
  Tracer2 tr{scene, pair, options, {pair.n1, pair.n2}};
  tr.h = options.h > 0 ? options.h : pair.delta / 200.0;
  tr.radius = options.radius > 0 ? options.radius : pair.delta;
  if (!(tr.h > 0) || !(tr.radius > 0))
    throw InvalidInput("trace_arc_2d: delta not estimated and no explicit h/radius");

  Vec seed = pair.p;
  double fs = 0.0;
  if (!tr.newton(seed, fs)) {
    const Vec g = tr.grad(pair.p);
    if (g.norm() < options.eps_g || !tr.bisect(pair.p, g.normalized(), seed, fs))
      throw NumericalError("trace_arc_2d: corrector diverged at the seed point");
  }
  const Vec g0 = tr.grad(seed);

  std::vector<Vec> back, fwd;
  std::vector<double> back_res, fwd_res, back_gm, fwd_gm;
  Vec t0 = vec2(-g0[1], g0[0]);
  const long budget = std::max<long>(1, options.step_limit - 1);
  Termination end, start = Termination::Seed;
  if (options.direction) {
    if (t0.dot(*options.direction) < 0) t0 = -t0;
    end = tr.run(seed, g0, t0, fwd, fwd_res, fwd_gm, budget);
  } else {
    end = tr.run(seed, g0, t0, fwd, fwd_res, fwd_gm, budget / 2);
    start = tr.run(seed, g0, -t0, back, back_res, back_gm, budget - budget / 2);
  }

  TracedArc arc;
  arc.dim = 2;
  arc.h = tr.h;
  arc.start_reason = start;
  arc.end_reason = end;
  for (size_t i = back.size(); i-- > 0;) {
    arc.vertices.push_back(back[i]);
    arc.residual.push_back(back_res[i]);
    arc.grad_mag.push_back(back_gm[i]);
  }
  arc.seed_index = arc.vertices.size();
  arc.vertices.push_back(seed);
  arc.residual.push_back(std::abs(fs));
  arc.grad_mag.push_back(g0.norm());
  for (size_t i = 0; i < fwd.size(); ++i) {
    arc.vertices.push_back(fwd[i]);
    arc.residual.push_back(fwd_res[i]);
    arc.grad_mag.push_back(fwd_gm[i]);
  }
  return arc;
}

namespace {

// Continuation of {f1 = f2 = 0} in R^3 with f_j = d_{N_0} - d_{N_j}.
struct Tracer3 {
  const Scene& scene;
  std::vector<Scene> parts;
  const TraceOptions& opt;
  Vec p;
  double h = 0.0;
  double radius = 0.0;

  Eigen::Vector2d F(const Vec& x) const {
    const double d0 = distance_to(parts[0], x);
    return {d0 - distance_to(parts[1], x), d0 - distance_to(parts[2], x)};
  }
  Eigen::Matrix<double, 2, 3> J(const Vec& x) const {
    Eigen::Matrix<double, 2, 3> j;
    const double eps = h / 16.0;
    for (int a = 0; a < 3; ++a) {
      Vec xp = x, xm = x;
      xp[a] += eps;
      xm[a] -= eps;
      j.col(a) = (F(xp) - F(xm)) / (2.0 * eps);
    }
    return j;
  }
  static Eigen::Vector3d tangent_of(const Eigen::Matrix<double, 2, 3>& j) {
    return Eigen::Vector3d(j.row(0).transpose()).cross(Eigen::Vector3d(j.row(1).transpose()));
  }

  // Newton on [F(y); t.(y - pred)] = 0; with pred = x the seed solve uses
  // the minimum-norm step instead.
  bool correct(Vec& y, const Eigen::Vector3d* t, const Vec& pred, Eigen::Vector2d& fy) const {
    fy = F(y);
    for (int it = 0; it < opt.newton_iterations && fy.norm() > opt.tol; ++it) {
      const Eigen::Matrix<double, 2, 3> j = J(y);
      Eigen::Vector3d step;
      if (t) {
        Eigen::Matrix3d a;
        a.topRows<2>() = j;
        a.row(2) = t->transpose();
        Eigen::Vector3d rhs;
        rhs << -fy, -t->dot(Eigen::Vector3d(y - pred));
        step = a.fullPivLu().solve(rhs);
      } else {
        step = j.transpose() * (j * j.transpose()).ldlt().solve(-fy);
      }
      if (!step.allFinite()) return false;
      y += Vec(step);
      fy = F(y);
      if ((y - pred).norm() > 2.0 * h) return false;
    }
    return fy.norm() <= opt.tol;
  }

  bool accept(const Vec& y) const {
    if (!opt.check_projection) return true;
    const ProjectionSet proj = project(scene, y);
    return proj.clusters.size() >= 3 && in_parts(proj, parts);
  }

  Termination run(const Vec& seed, Eigen::Vector3d dir, std::vector<Vec>& verts,
                  std::vector<double>& res, std::vector<double>& gm, long budget) const {
    Vec x = seed;
    for (long n = 0;; ++n) {
      if (n >= budget) return Termination::StepLimit;
      Eigen::Vector3d t = tangent_of(J(x));
      const double tn = t.norm();
      if (tn < opt.eps_g) return Termination::GradientDegenerate;
      t /= tn;
      if (t.dot(dir) < 0) t = -t;
      bool accepted = false;
      Vec y;
      Eigen::Vector2d fy;
      for (double step = h; step >= 0.25 * h; step *= 0.5) {
        const Vec pred = x + Vec(step * t);
        y = pred;
        if (!correct(y, &t, pred, fy)) continue;
        const double s = (y - x).norm();
        if (s >= 0.25 * h && s <= 2.0 * h) {
          accepted = true;
          break;
        }
      }
      if (!accepted) return Termination::CorrectorFailed;
      if ((y - p).norm() > radius) return Termination::LeftBall;
      if (opt.window && !opt.window->contains(y)) return Termination::LeftWindow;
      if (!accept(y)) return Termination::ProjectionEscaped;
      verts.push_back(y);
      res.push_back(fy.cwiseAbs().maxCoeff());
      gm.push_back(tangent_of(J(y)).norm());
      dir = Eigen::Vector3d(y - x);
      x = y;
    }
  }
};

}  // namespace

TracedArc trace_codim2_3d(const Scene& scene, const SingularSample& sample,
                          const Codim2Options& options) {
  if (scene.dim() != 3) throw InvalidInput("trace_codim2_3d needs a scene in R^3");
  if (sample.overflow() || sample.k != 3 || sample.projection.clusters.size() != 3)
    throw InvalidInput("trace_codim2_3d needs a sample with exactly three clusters");
  std::vector<Vec> reps;
  for (const Cluster& c : sample.projection.clusters) reps.push_back(c.representative);
  if (affine_rank(reps, options.simplex_tol) != 2)
    throw InvalidInput("trace_codim2_3d: base points do not span a triangle");

  const Norm& norm = scene.norm();
  double rad = 0.0;
  std::vector<Scene> parts;
  for (int a = 0; a < 3; ++a) {
    double sep = kInf;
    for (int b = 0; b < 3; ++b) {
      if (b == a) continue;
      sep = std::min(sep, dist_max(norm, reps[a], reps[b]));
      rad = std::max(rad, dist_max(norm, reps[a], reps[b]));
    }
    auto part = clip_by_ball(scene, reps[a], sep / 4.0);
    if (!part) throw NumericalError("trace_codim2_3d: representative not on N");
    parts.push_back(std::move(*part));
  }

  const TraceOptions& topt = options.trace;
  double delta = 0.0;
  if (topt.h <= 0 || topt.radius <= 0)
    delta = estimate_delta_parts(scene, sample.point, rad, parts, options.delta);
  Tracer3 tr{scene, parts, topt, sample.point};
  tr.h = topt.h > 0 ? topt.h : delta / 200.0;
  tr.radius = topt.radius > 0 ? topt.radius : delta;

  Vec seed = sample.point;
  Eigen::Vector2d fs;
  if (!tr.correct(seed, nullptr, sample.point, fs))
    throw NumericalError("trace_codim2_3d: corrector diverged at the seed point");
  const Eigen::Vector3d t0 = Tracer3::tangent_of(tr.J(seed));
  if (t0.norm() < topt.eps_g)
    throw NumericalError("trace_codim2_3d: rank-deficient differential pair at the seed");

  std::vector<Vec> back, fwd;
  std::vector<double> back_res, fwd_res, back_gm, fwd_gm;
  const long budget = std::max<long>(1, topt.step_limit - 1);
  TracedArc arc;
  arc.dim = 3;
  arc.h = tr.h;
  arc.end_reason = tr.run(seed, t0, fwd, fwd_res, fwd_gm, budget / 2);
  arc.start_reason = tr.run(seed, -t0, back, back_res, back_gm, budget - budget / 2);
  for (size_t i = back.size(); i-- > 0;) {
    arc.vertices.push_back(back[i]);
    arc.residual.push_back(back_res[i]);
    arc.grad_mag.push_back(back_gm[i]);
  }
  arc.seed_index = arc.vertices.size();
  arc.vertices.push_back(seed);
  arc.residual.push_back(fs.cwiseAbs().maxCoeff());
  arc.grad_mag.push_back(t0.norm());
  for (size_t i = 0; i < fwd.size(); ++i) {
    arc.vertices.push_back(fwd[i]);
    arc.residual.push_back(fwd_res[i]);
    arc.grad_mag.push_back(fwd_gm[i]);
  }
  return arc;
}

}  // namespace medial
