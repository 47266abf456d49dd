#include "medial/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

namespace medial {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double angle_between(const Vec& a, const Vec& b) {
  return std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b));
}

}  // namespace

SectorFan sectors_at(const Scene& scene, const Vec& p, double delta0) {
  if (scene.dim() != 2) throw InvalidInput("sectors are defined for planar scenes");
  auto sample = classify(scene, p);
  if (!sample) throw InvalidInput("sectors_at: point is not singular");
  SectorFan fan;
  fan.p = p;
  fan.delta0 = delta0 > 0 ? delta0 : std::min(sample->projection.distance / 2.0, sample->rad / 2.0);
  if (sample->overflow()) {
    fan.isolated = true;
    return fan;
  }
  std::vector<std::pair<double, Vec>> dirs;
  for (const Cluster& c : sample->projection.clusters) {
    const Vec d = c.representative - p;
    dirs.emplace_back(wrap(std::atan2(d[1], d[0])), c.representative);
  }
  std::sort(dirs.begin(), dirs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [a, q] : dirs) {
    fan.angles.push_back(a);
    fan.base_points.push_back(q);
  }
  const int n = static_cast<int>(dirs.size());
  for (int i = 0; i < n; ++i) {
    Sector s;
    s.index = i;
    s.from = i;
    s.to = (i + 1) % n;
    s.start_angle = fan.angles[i];
    s.gap = n == 1 ? kTwoPi : wrap(fan.angles[s.to] - fan.angles[i]);
    fan.sectors.push_back(s);
  }
  return fan;
}

SubarcPair sector_subarcs(const Scene& scene, const SectorFan& fan, const Sector& sector,
                          double radius) {
  if (fan.sectors.size() < 2 || sector.from == sector.to)
    throw InvalidInput("sector_subarcs: sector needs two bounding segments");
  const Vec& q1 = fan.base_points.at(sector.from);
  const Vec& q2 = fan.base_points.at(sector.to);
  const double sep = dist_max(scene.norm(), q1, q2);
  double r = radius > 0 ? radius : sep / 4.0;
  auto unique_onto = [&](const Scene& part, const Vec& q) {
    const ProjectionSet proj = project(part, fan.p);
    return proj.clusters.size() == 1 && !proj.overflow &&
           dist_max(scene.norm(), proj.clusters[0].representative, q) <= proj.sep;
  };
  for (int halving = 0; halving <= 20; ++halving, r *= 0.5) {
    // Balls of radius < sep/2 in the metric dist_max cannot meet.
    if (!(2.0 * r < sep)) continue;
    auto n1 = clip_by_ball(scene, q1, r);
    auto n2 = clip_by_ball(scene, q2, r);
    if (!n1 || !n2) throw NumericalError("sector_subarcs: base point not on N");
    if (unique_onto(*n1, q1) && unique_onto(*n2, q2)) return {std::move(*n1), std::move(*n2), r};
  }
  throw NumericalError("sector_subarcs: no disjoint subarcs after 20 halvings");
}

SectorArc sector_arc(const Scene& scene, const SectorFan& fan, const Sector& sector,
                     const TraceOptions& options) {
  SubarcPair parts = sector_subarcs(scene, fan, sector);
  const Vec& q1 = fan.base_points[sector.from];
  const Vec& q2 = fan.base_points[sector.to];

  // omega_i = differential of d_{N_i} at p; v spans the kernel of the gap.
  const Norm& norm = scene.norm();
  const Covector w1 = differential(norm, fan.p - q1), w2 = differential(norm, fan.p - q2);
  const Vec w = w1.components - w2.components;
  if (w.norm() < 1e-12) throw NumericalError("sector_arc: coincident differentials at p");
  const Vec v = vec2(-w[1], w[0]).normalized();
  const Vec start = vec2(std::cos(sector.start_angle), std::sin(sector.start_angle));
  // Of the two kernel directions keep the one inside the angular gap, or
  // failing that the one closest to its middle.
  Vec tangent;
  double offset = 0.0, best = std::numeric_limits<double>::infinity();
  for (const Vec& cand : {v, Vec(-v)}) {
    const double off = wrap(angle_between(start, cand));
    const double miss = std::abs(off - 0.5 * sector.gap);
    if (miss < best) {
      best = miss;
      tangent = cand;
      offset = off;
    }
  }

  SplitPair pair{parts.n1, parts.n2, q1, q2, fan.p, dist_max(norm, q1, q2), fan.delta0};
  TraceOptions opt = options;
  opt.direction = tangent;
  TracedArc arc = trace_arc_2d(scene, pair, opt);
  return SectorArc{sector, fan.p, std::move(parts), std::move(arc), tangent,
                   std::abs(w1(tangent) - w2(tangent)), offset};
}

JoinedArc join_arcs(const SectorArc& a, const SectorArc& b) {
  if ((a.p - b.p).norm() > 1e-12) throw InvalidInput("join_arcs: arcs start at different points");
  if (a.sector.index == b.sector.index) throw InvalidInput("join_arcs: same sector");
  JoinedArc out;
  TracedArc& arc = out.arc;
  arc.dim = 2;
  arc.h = std::max(a.arc.h, b.arc.h);
  arc.start_reason = a.arc.end_reason;
  arc.end_reason = b.arc.end_reason;
  for (size_t i = a.arc.vertices.size(); i-- > 0;) {
    arc.vertices.push_back(a.arc.vertices[i]);
    arc.residual.push_back(a.arc.residual[i]);
    arc.grad_mag.push_back(a.arc.grad_mag[i]);
  }
  arc.seed_index = arc.vertices.size() - 1;
  for (size_t i = 1; i < b.arc.vertices.size(); ++i) {
    arc.vertices.push_back(b.arc.vertices[i]);
    arc.residual.push_back(b.arc.residual[i]);
    arc.grad_mag.push_back(b.arc.grad_mag[i]);
  }
  // Incoming direction -v_a, outgoing v_b.
  const double between = std::abs(angle_between(-a.tangent, b.tangent));
  out.turning_angle = between;
  out.graphical = between < std::numbers::pi - 1e-9;
  return out;
}

}  // namespace medial
