#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "medial/gallery.hpp"
#include "medial/propagate.hpp"

using namespace medial;

namespace {

Box square(const Vec& c, double r) { return {c.array() - r, c.array() + r}; }

SingularSample sample_at(const Scene& scene, const Vec& p) {
  auto s = classify(scene, p);
  REQUIRE(s);
  return *s;
}

// Total variation of the tangent angle along a polyline.
double turning_variation(const std::vector<Vec>& v) {
  double tv = 0.0;
  for (size_t i = 2; i < v.size(); ++i) {
    const Vec a = v[i - 1] - v[i - 2], b = v[i] - v[i - 1];
    tv += std::abs(std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b)));
  }
  return tv;
}

void check_arc_invariants(const Scene& scene, const SplitPair& pair, const TracedArc& arc,
                          double tol) {
  REQUIRE(arc.vertices.size() >= 2);
  for (double r : arc.residual) CHECK(r <= tol);
  for (size_t i = 1; i < arc.vertices.size(); ++i) {
    const double s = (arc.vertices[i] - arc.vertices[i - 1]).norm();
    CHECK(s >= 0.25 * arc.h * (1 - 1e-12));
    CHECK(s <= 2.0 * arc.h * (1 + 1e-12));
  }
  CHECK((arc.vertices[arc.seed_index] - pair.p).norm() <= 1e-6);
  // Arc membership: two clusters, both in N1 u N2.
  for (size_t i = 0; i < arc.vertices.size(); i += std::max<size_t>(1, arc.vertices.size() / 25)) {
    auto s = classify(scene, arc.vertices[i]);
    REQUIRE(s);
    CHECK(s->k >= 2);
    for (const Cluster& c : s->projection.clusters)
      CHECK(std::min(distance_to(pair.n1, c.representative),
                     distance_to(pair.n2, c.representative)) <= s->projection.sep);
  }
}

// Euclidean distance from x to the left branch of |x - q1| - |x - q2| = 1,
// foci (+-1, 0): x^2 / (1/4) - y^2 / (3/4) = 1, x < 0.
double hyperbola_distance(const Vec& x) {
  auto point = [](double t) { return vec2(-0.5 * std::cosh(t), std::sqrt(0.75) * std::sinh(t)); };
  const double t0 = std::asinh(x[1] / std::sqrt(0.75));
  const double t = golden_section([&](double s) { return (point(s) - x).norm(); }, t0 - 0.5, t0 + 0.5, 120);
  return (point(t) - x).norm();
}

}  // namespace

TEST_CASE("split") {
  const Scene two = two_point_scene();
  const SplitPair pair = split(two, sample_at(two, vec2(0, 0)));
  CHECK(pair.rad == doctest::Approx(2.0));
  const Vec q1 = pair.q1, q2 = pair.q2;
  CHECK(std::abs(q1[0]) == 1.0);
  CHECK(q1[0] == -q2[0]);
  CHECK(distance_to(pair.n1, q1) == 0.0);
  CHECK(distance_to(pair.n2, q2) == 0.0);
  CHECK(distance_to(pair.n1, q2) > 1.9);

  // Branch example at the origin: balls of radius 1/2 around (+-1, 0).
  const BranchExample br = branch_example();
  const SplitPair bp = split(br.scene, sample_at(br.scene, vec2(0, 0)));
  CHECK(bp.rad == doctest::Approx(2.0));
  for (int k = 1; k <= br.k_max; ++k) {
    for (double side : {-1.0, 1.0}) {
      const Vec y = vec2(side, 1.0 / k);
      const bool expected = 1.0 / k <= 0.5;
      const Scene& part = (bp.q1[0] == side) ? bp.n1 : bp.n2;
      CHECK((distance_to(part, y) == 0.0) == expected);
    }
  }
  // Disjointness and radius bounds.
  for (const Scene* part : {&bp.n1, &bp.n2}) {
    for (const Primitive& prim : part->primitives())
      for (const Vec& y : sample_primitive(prim, 0.01)) {
        const Vec& q = part == &bp.n1 ? bp.q1 : bp.q2;
        CHECK(dist_max(br.scene.norm(), q, y) <= bp.rad / 4 + 1e-12);
      }
  }

  SingularSample bad = sample_at(two, vec2(0, 0));
  bad.projection.clusters[1].representative = bad.projection.clusters[0].representative;
  CHECK_THROWS_AS(split(two, bad), InvalidInput);
  const TriangleExample tri = triangle_scene();
  CHECK_THROWS_AS(split(tri.scene, sample_at(tri.scene, tri.circumcenter)), InvalidInput);
}

TEST_CASE("f_eval") {
  const Scene two = two_point_scene();
  const SplitPair pair = split(two, sample_at(two, vec2(0, 0)));
  const double sign = pair.q1[0] > 0 ? 1.0 : -1.0;
  for (double y : {-3.0, 0.0, 0.7, 10.0}) CHECK(std::abs(f_eval(pair, vec2(0, y))) <= 1e-12);
  CHECK(sign * f_eval(pair, vec2(0.5, 0)) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(f_eval(pair, pair.p)) <= 1e-9);

  const BranchExample br = branch_example();
  const SplitPair bp = split(br.scene, sample_at(br.scene, vec2(0, 0)));
  CHECK(std::abs(f_eval(bp, vec2(0, 0.1))) <= 1e-12);
}

TEST_CASE("estimate_delta") {
  const Scene two = two_point_scene();
  const SplitPair pair = split(two, sample_at(two, vec2(0, 0)));
  // r = rad/2 = 1 touches N; r = 1/2 passes and delta stores half of it.
  CHECK(estimate_delta(two, pair) == 0.25);

  const Scene third(Norm::euclidean(2), {PointSet{{vec2(1, 0), vec2(-1, 0), vec2(0, 1.01)}}});
  const SplitPair tp = split(third, sample_at(third, vec2(0, 0)));
  const double d = estimate_delta(third, tp);
  CHECK(d < 0.01);
  CHECK(d > 0.0);

  // Branch example at the origin: every X_k line below y = 1/2 projects into
  // the split, so only (+-1, 1) beyond a_1 = 3/4 can escape. Regression value.
  const BranchExample br = branch_example();
  const SplitPair bp = split(br.scene, sample_at(br.scene, vec2(0, 0)));
  const double db = estimate_delta(br.scene, bp);
  CHECK(db == 0.25);
  CHECK(db < (vec2(1, 1) - vec2(0, 0)).norm() - 1.0);
}

TEST_CASE("trace: two-point Euclidean bisector") {
  const Scene two = two_point_scene();
  SplitPair pair = split(two, sample_at(two, vec2(0, 0.1)));
  pair.delta = estimate_delta(two, pair);
  const TracedArc arc = trace_arc_2d(two, pair);
  check_arc_invariants(two, pair, arc, 1e-10);
  double dev = 0.0;
  for (const Vec& v : arc.vertices) dev = std::max(dev, std::abs(v[0]));
  CHECK(dev < 1e-6);
  CHECK(arc.start_reason == Termination::LeftBall);
  CHECK(arc.end_reason == Termination::LeftBall);
  const double span = (arc.vertices.front() - arc.vertices.back()).norm();
  CHECK(span > 2.0 * pair.delta - 4.0 * arc.h);
  CHECK(span <= 2.0 * pair.delta);
}

TEST_CASE("trace: branch example at the origin follows Y") {
  const BranchExample br = branch_example();
  SplitPair pair = split(br.scene, sample_at(br.scene, vec2(0, 0)));
  pair.delta = 0.2;
  const TracedArc arc = trace_arc_2d(br.scene, pair);
  check_arc_invariants(br.scene, pair, arc, 1e-10);
  for (const Vec& v : arc.vertices) CHECK(std::abs(v[0]) < 1e-6);
  CHECK(arc.vertices.front()[1] * arc.vertices.back()[1] < 0);

  // Cleaving: off-arc samples in B_0.2 lie on X \ Y with rad <= 1/2.
  const double h = 1.0 / 512;
  const OracleGrid grid = oracle_scan(br.scene, square(vec2(0, 0), 0.25), h, {1e-3});
  const auto samples = refine_flagged(br.scene, grid);
  const CleavingReport rep = cleaving_check(pair, arc, samples, h);
  CHECK(rep.pass);
  CHECK(rep.inside > 0);
  CHECK(!rep.off_arc.empty());
  CHECK(rep.max_off_rad <= 0.5);
  for (const SingularSample& s : rep.off_arc) CHECK(br.distance_to_oracle(s.point) <= 2 * h);
}

TEST_CASE("trace: Randers two-point bisector is a hyperbola branch") {
  const Norm randers = Norm::randers(Mat::Identity(2, 2), vec2(0.5, 0));
  const Scene scene = two_point_scene(randers);
  SplitPair pair = split(scene, sample_at(scene, vec2(-0.5, 0)));
  CHECK(pair.rad == doctest::Approx(3.0));
  pair.delta = estimate_delta(scene, pair);
  CHECK(pair.delta > 0.0);

  TraceOptions opt;
  opt.h = 1.0 / 512;
  opt.radius = 0.6;
  const TracedArc arc = trace_arc_2d(scene, pair, opt);
  check_arc_invariants(scene, pair, arc, 1e-10);
  double dev = 0.0;
  for (const Vec& v : arc.vertices) dev = std::max(dev, hyperbola_distance(v));
  CHECK(dev < 1e-6);

  // Grid oracle agreement within 2h.
  const double h = 1.0 / 512;
  const OracleGrid grid = oracle_scan(scene, square(vec2(-0.55, 0), 0.4), h);
  for (const Vec& v : arc.vertices)
    if (grid.window.contains(v)) CHECK(distance_to_flagged(grid, v) <= 2 * h);
  for (const OracleCell& c : grid.flagged) CHECK(distance_to_polyline(arc.vertices, c.center) <= 2 * h);
}

TEST_CASE("trace: symmetry equivariance") {
  // A quarter turn of points and drift maps the traced arc onto the new one.
  const Scene sa(Norm::randers(Mat::Identity(2, 2), vec2(0.3, 0.1)),
                 {PointSet{{vec2(1, 0), vec2(-1, 0.2)}}});
  const Scene sb(Norm::randers(Mat::Identity(2, 2), vec2(-0.1, 0.3)),
                 {PointSet{{vec2(0, 1), vec2(-0.2, -1)}}});
  auto rot = [](const Vec& v) { return vec2(-v[1], v[0]); };

  // Seed on the segment between the points where both distances agree.
  const Vec q1 = vec2(1, 0), q2 = vec2(-1, 0.2);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    const Vec x = q1 + m * (q2 - q1);
    (sa.norm()(x - q1) < sa.norm()(x - q2) ? lo : hi) = m;
  }
  const Vec p = q1 + lo * (q2 - q1);

  TraceOptions opt;
  opt.h = 1.0 / 256;
  opt.radius = 0.5;
  const TracedArc arc_a = trace_arc_2d(sa, split(sa, sample_at(sa, p)), opt);
  const TracedArc arc_b = trace_arc_2d(sb, split(sb, sample_at(sb, rot(p))), opt);
  std::vector<Vec> mapped;
  for (const Vec& v : arc_a.vertices) mapped.push_back(rot(v));
  REQUIRE(arc_a.vertices.size() > 100);
  // Away from the ends the two polylines carry the same vertices.
  for (size_t i = 2; i + 2 < arc_b.vertices.size(); ++i) {
    double best = 1e300;
    for (const Vec& m : mapped) best = std::min(best, (m - arc_b.vertices[i]).norm());
    CHECK(best <= 1e-9);
  }
}

TEST_CASE("trace: refinement stability of curved bisectors") {
  const Norm randers = Norm::randers(Mat::Identity(2, 2), vec2(0.5, 0));
  const Scene hyper = two_point_scene(randers);
  // Point and segment: a parabola.
  const Scene para(Norm::euclidean(2), {PointSet{{vec2(0, 1)}}, Segment{vec2(-3, -1), vec2(3, -1)}});
  struct Case {
    const Scene* scene;
    Vec seed;
  };
  for (const Case& c : {Case{&hyper, vec2(-0.5, 0)}, Case{&para, vec2(0, 0)}}) {
    SplitPair pair = split(*c.scene, sample_at(*c.scene, c.seed));
    TraceOptions opt;
    opt.radius = 0.8;
    opt.h = 1.0 / 256;
    const double tv1 = turning_variation(trace_arc_2d(*c.scene, pair, opt).vertices);
    opt.h = 1.0 / 512;
    const double tv2 = turning_variation(trace_arc_2d(*c.scene, pair, opt).vertices);
    CHECK(tv1 > 0.3);
    CHECK(std::abs(tv1 - tv2) < 0.05 * tv2);
  }
}

TEST_CASE("trace: errors") {
  const Scene two = two_point_scene();
  const SplitPair pair = split(two, sample_at(two, vec2(0, 0)));
  CHECK_THROWS_AS(trace_arc_2d(two, pair), InvalidInput);  // delta unset
  const Scene two3(Norm::euclidean(3), {PointSet{{vec3(1, 0, 0), vec3(-1, 0, 0)}}});
  SplitPair p3 = split(two3, sample_at(two3, vec3(0, 0, 0)));
  p3.delta = 0.25;
  CHECK_THROWS_AS(trace_arc_2d(two3, p3), InvalidInput);
}

TEST_CASE("extract_surface_3d") {
  Mat m = Mat::Identity(3, 3);
  m(0, 0) = 4.0;
  for (const Norm& norm : {Norm::euclidean(3), Norm::quadratic(m)}) {
    const Scene scene(norm, {PointSet{{vec3(1, 0, 0), vec3(-1, 0, 0)}}});
    SplitPair pair = split(scene, sample_at(scene, vec3(0, 0.05, -0.02)));
    pair.delta = estimate_delta(scene, pair);
    const TracedSurface s = extract_surface_3d(pair, 16);
    REQUIRE(s.triangles.size() > 50);
    double dev = 0.0;
    for (size_t i = 0; i < s.vertices.size(); ++i) {
      dev = std::max(dev, std::abs(s.vertices[i][0]));
      CHECK(s.residual[i] < 1e-9);
      CHECK((s.vertices[i] - pair.p).norm() <= pair.delta);
    }
    CHECK(dev < 1e-6);
    // Two points: nothing singular off the plane, vacuous cleaving pass.
    const CleavingReport rep = cleaving_check(pair, s, {sample_at(scene, pair.p)}, 0.01);
    CHECK(rep.pass);
    CHECK(rep.off_arc.empty());
  }
  const Scene two = two_point_scene();
  SplitPair flat = split(two, sample_at(two, vec2(0, 0)));
  flat.delta = 0.25;
  CHECK_THROWS_AS(extract_surface_3d(flat), InvalidInput);
}

TEST_CASE("extract_surface_3d: mirrored branch scene against a 3D scan") {
  // Branch points at z = 0 plus their mirror images through the plane
  // y = 0; the bisector of the two stacks near the origin is x = 0.
  std::vector<Vec> pts;
  for (int k = 1; k <= 16; ++k)
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0}) pts.push_back(vec3(sx, sy / k, 0));
  for (double sx : {-1.0, 1.0}) pts.push_back(vec3(sx, 0, 0));
  const Scene scene(Norm::euclidean(3), {PointSet{pts}});
  SplitPair pair = split(scene, sample_at(scene, vec3(0, 0.01, 0.3)));
  pair.delta = estimate_delta(scene, pair);
  const TracedSurface s = extract_surface_3d(pair, 15);
  const double h = pair.delta / 8;
  const OracleGrid grid = oracle_scan(scene, square(pair.p, pair.delta), h);
  for (const Vec& v : s.vertices) CHECK(distance_to_flagged(grid, v) <= 2 * h);
}

TEST_CASE("cleaving: adversarial third point") {
  const Scene scene(Norm::euclidean(2), {PointSet{{vec2(1, 0), vec2(-1, 0), vec2(0, 0.9)}}});
  SplitPair pair = split(scene, sample_at(scene, vec2(0, -0.2)));
  pair.delta = estimate_delta(scene, pair);
  const TracedArc arc = trace_arc_2d(scene, pair);
  const double h = pair.delta / 64;
  const OracleGrid grid = oracle_scan(scene, square(pair.p, 1.2 * pair.delta), h, {1e-3});
  const CleavingReport rep = cleaving_check(pair, arc, refine_flagged(scene, grid), h);
  CHECK(rep.inside > 0);
  CHECK(rep.pass);
}

TEST_CASE("cover: two points and the triangle") {
  const Scene two = two_point_scene();
  const CoverReport rep = cover(two, square(vec2(0, 0), 0.5), {1.0 / 128});
  CHECK(rep.arcs.size() == 1);
  CHECK(rep.residual.empty());
  CHECK(rep.covered == rep.sigma2_samples);
  CHECK_FALSE(rep.cap_hit);

  const TriangleExample tri = triangle_scene();
  const double h = 1.0 / 256;
  const CoverReport tr = cover(tri.scene, square(tri.circumcenter, 0.3), {h});
  CHECK(tr.arcs.size() == 3);
  CHECK_FALSE(tr.residual.empty());
  for (const ResidualSample& r : tr.residual) {
    CHECK(r.sample.k == 3);
    CHECK((r.sample.point - tri.circumcenter).norm() <= 2 * h);
  }
  for (const CoverArc& a : tr.arcs)
    for (const Vec& v : a.arc.vertices) CHECK(tri.distance_to_oracle(v) <= 1e-6);
  // Strata partition the sampled Sigma_2 set.
  int total = 0;
  for (const CoverStratum& st : tr.strata) total += static_cast<int>(st.samples.size());
  CHECK(total == tr.sigma2_samples);
}

namespace {

// {x : (x - a)^T M (x - a) equal for a = q0, q1, q2} is the line through
// the M-circumcenter in direction M^{-1} n, n the normal of the plane.
double quadratic_axis_distance(const Mat& m, const std::array<Vec, 3>& q, const Vec& x) {
  Eigen::Matrix3d a;
  Eigen::Vector3d rhs;
  for (int r = 0; r < 2; ++r) {
    const Vec d = q[r + 1] - q[0];
    a.row(r) = (2.0 * m * d).transpose();
    rhs[r] = q[r + 1].dot(m * q[r + 1]) - q[0].dot(m * q[0]);
  }
  const Eigen::Vector3d n = Eigen::Vector3d(q[1] - q[0]).cross(Eigen::Vector3d(q[2] - q[0]));
  a.row(2) = n.transpose();
  rhs[2] = n.dot(Eigen::Vector3d(q[0]));
  const Eigen::Vector3d c = a.fullPivLu().solve(rhs);
  const Eigen::Vector3d dir = Eigen::Matrix3d(m).inverse() * n;
  const Eigen::Vector3d r = Eigen::Vector3d(x) - c;
  return (r - r.dot(dir.normalized()) * dir.normalized()).norm();
}

}  // namespace

TEST_CASE("trace_codim2_3d") {
  const std::array<Vec, 3> q = {vec3(1, 0, 0), vec3(-0.4, 0.9, 0.1), vec3(-0.3, -0.8, -0.2)};
  Mat quad = Mat::Identity(3, 3);
  quad(2, 2) = 4.0;
  for (const Mat& m : {Mat(Mat::Identity(3, 3)), quad}) {
    const Scene scene(Norm::quadratic(m), {PointSet{{q[0], q[1], q[2]}}});
    // Seed: the axis point in the plane of the triangle.
    Eigen::Matrix3d a;
    Eigen::Vector3d rhs;
    for (int r = 0; r < 2; ++r) {
      const Vec d = q[r + 1] - q[0];
      a.row(r) = (2.0 * m * d).transpose();
      rhs[r] = q[r + 1].dot(m * q[r + 1]) - q[0].dot(m * q[0]);
    }
    const Eigen::Vector3d n = Eigen::Vector3d(q[1] - q[0]).cross(Eigen::Vector3d(q[2] - q[0]));
    a.row(2) = n.transpose();
    rhs[2] = n.dot(Eigen::Vector3d(q[0]));
    const Vec c = Vec(a.fullPivLu().solve(rhs));
    const SingularSample s = sample_at(scene, c);
    REQUIRE(s.k == 3);
    Codim2Options opt;
    opt.trace.h = 1.0 / 128;
    opt.trace.radius = 0.5;
    const TracedArc arc = trace_codim2_3d(scene, s, opt);
    REQUIRE(arc.vertices.size() > 100);
    for (size_t i = 0; i < arc.vertices.size(); ++i) {
      CHECK(quadratic_axis_distance(m, q, arc.vertices[i]) < 1e-6);
      CHECK(arc.residual[i] <= 1e-10);
    }
    for (size_t i = 0; i < arc.vertices.size(); i += 10) {
      auto cs = classify(scene, arc.vertices[i]);
      REQUIRE(cs);
      CHECK(cs->k >= 3);
    }
  }

  // Equilateral triangle: the axis passes through the centroid.
  const double r3 = std::sqrt(3.0);
  const Scene eq(Norm::euclidean(3), {PointSet{{vec3(0, 0, 0), vec3(1, 0, 0), vec3(0.5, r3 / 2, 0)}}});
  const Vec g = vec3(0.5, r3 / 6, 0);
  Codim2Options opt;
  opt.trace.h = 1.0 / 128;
  opt.trace.radius = 0.3;
  const TracedArc arc = trace_codim2_3d(eq, sample_at(eq, g), opt);
  for (const Vec& v : arc.vertices) CHECK((v.head(2) - g.head(2)).norm() < 1e-6);

  // Collinear base points are rejected.
  const Scene two = two_point_scene();
  CHECK_THROWS_AS(trace_codim2_3d(two, sample_at(two, vec2(0, 0))), InvalidInput);
}
