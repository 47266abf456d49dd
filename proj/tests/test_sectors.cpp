#include <cmath>
#include <numbers>

#include "doctest.h"
#include "medial/gallery.hpp"
#include "medial/sectors.hpp"

using namespace medial;

namespace {

constexpr double kPi = std::numbers::pi;

double angle_of(const Vec& v) { return std::atan2(v[1], v[0]); }

double wrap(double a) {
  a = std::fmod(a, 2 * kPi);
  return a < 0 ? a + 2 * kPi : a;
}

// Sector nonemptiness and cone membership for every sector of a fan.
std::vector<SectorArc> check_fan(const Scene& scene, const SectorFan& fan) {
  double sum = 0.0;
  for (const Sector& s : fan.sectors) sum += s.gap;
  CHECK(std::abs(sum - 2 * kPi) <= 1e-9);
  std::vector<SectorArc> arcs;
  for (const Sector& s : fan.sectors) {
    SectorArc a = sector_arc(scene, fan, s);
    CHECK(a.omega_gap <= 1e-6);
    REQUIRE(a.arc.vertices.size() > 10);
    CHECK((a.arc.vertices.front() - fan.p).norm() <= 1e-9);
    CHECK(a.arc.start_reason == Termination::Seed);
    for (size_t i = 1; i <= 10; ++i) {
      const Vec& v = a.arc.vertices[i];
      const double off = wrap(angle_of(v - fan.p) - s.start_angle);
      CHECK(off > 0.0);
      CHECK(off < s.gap);
      auto c = classify(scene, v);
      REQUIRE(c);
      CHECK(c->k >= 2);
    }
    arcs.push_back(std::move(a));
  }
  return arcs;
}

}  // namespace

TEST_CASE("sectors: two points") {
  const Scene two = two_point_scene();
  for (const Sector& s : sectors_at(two, vec2(0, 0)).sectors)
    CHECK(s.gap == doctest::Approx(kPi).epsilon(1e-9));
  const SectorFan fan = sectors_at(two, vec2(0, 0.2));
  REQUIRE(fan.sectors.size() == 2);
  const SubarcPair sub = sector_subarcs(two, fan, fan.sectors[0]);
  CHECK(sub.n1.primitives().size() == 1);
  CHECK(std::get<PointSet>(sub.n1.primitives()[0]).points.size() == 1);
  CHECK(std::get<PointSet>(sub.n2.primitives()[0]).points.size() == 1);

  const auto arcs = check_fan(two, fan);
  for (const SectorArc& a : arcs) {
    for (const Vec& v : a.arc.vertices) CHECK(std::abs(v[0]) <= 1e-9);
    CHECK(a.tangent_offset == doctest::Approx(a.sector.gap / 2).epsilon(1e-9));
  }
  const JoinedArc j = join_arcs(arcs[0], arcs[1]);
  CHECK(j.turning_angle <= 1e-9);
  CHECK(j.graphical);
  CHECK(j.arc.vertices.size() == arcs[0].arc.vertices.size() + arcs[1].arc.vertices.size() - 1);
  CHECK((j.arc.vertices[j.arc.seed_index] - fan.p).norm() <= 1e-12);
  CHECK_THROWS_AS(join_arcs(arcs[0], arcs[0]), InvalidInput);
  CHECK_THROWS_AS(sectors_at(two, vec2(0.5, 0)), InvalidInput);
}

TEST_CASE("sectors: triangle circumcenter") {
  const TriangleExample tri = triangle_scene();
  const SectorFan fan = sectors_at(tri.scene, tri.circumcenter);
  REQUIRE(fan.sectors.size() == 3);
  // Gaps from the analytic directions to the vertices.
  std::vector<double> ang;
  for (const Vec& v : tri.vertices) ang.push_back(wrap(angle_of(v - tri.circumcenter)));
  std::sort(ang.begin(), ang.end());
  for (int i = 0; i < 3; ++i) {
    const double expect = wrap(ang[(i + 1) % 3] - ang[i]);
    CHECK(fan.sectors[i].gap == doctest::Approx(expect).epsilon(1e-9));
  }
  const auto arcs = check_fan(tri.scene, fan);
  for (const SectorArc& a : arcs) {
    // Euclidean: the omega-bisector is the classical angle bisector.
    CHECK(a.tangent_offset == doctest::Approx(a.sector.gap / 2).epsilon(1e-9));
    for (const Vec& v : a.arc.vertices) CHECK(tri.distance_to_oracle(v) <= 1e-6);
  }
  for (int i = 0; i < 3; ++i) {
    const SectorArc& a = arcs[i];
    const SectorArc& b = arcs[(i + 1) % 3];
    const JoinedArc j = join_arcs(a, b);
    const double rays = std::abs(std::atan2(a.tangent[0] * b.tangent[1] - a.tangent[1] * b.tangent[0],
                                            a.tangent.dot(b.tangent)));
    CHECK(j.turning_angle == doctest::Approx(kPi - rays).epsilon(1e-9));
    CHECK(j.graphical);
  }
}

TEST_CASE("sectors: regular polygons and the square") {
  for (int k : {2, 3, 4, 5}) {
    const PolygonExample poly = polygon_scene(k);
    const SectorFan fan = sectors_at(poly.scene, vec2(0, 0));
    CHECK(fan.sectors.size() == static_cast<size_t>(k + 1));
    const auto arcs = check_fan(poly.scene, fan);
    for (const SectorArc& a : arcs)
      for (const Vec& v : a.arc.vertices) CHECK(poly.distance_to_oracle(v) <= 1e-6);
  }
  // Axis-aligned square: sectors arcs run along the diagonals.
  const Scene square(Norm::euclidean(2),
                     {Polyline{{vec2(-1, -1), vec2(1, -1), vec2(1, 1), vec2(-1, 1), vec2(-1, -1)}}});
  const SectorFan fan = sectors_at(square, vec2(0, 0));
  REQUIRE(fan.sectors.size() == 4);
  const SubarcPair sub = sector_subarcs(square, fan, fan.sectors[0]);
  CHECK(distance_to(sub.n1, fan.base_points[fan.sectors[0].from]) == 0.0);
  for (const SectorArc& a : check_fan(square, fan))
    for (const Vec& v : a.arc.vertices) CHECK(std::abs(std::abs(v[0]) - std::abs(v[1])) <= 1e-6);
}

TEST_CASE("sectors: branch example at the origin") {
  const BranchExample br = branch_example();
  const SectorFan fan = sectors_at(br.scene, vec2(0, 0));
  REQUIRE(fan.sectors.size() == 2);
  const SubarcPair sub = sector_subarcs(br.scene, fan, fan.sectors[0]);
  // Truncated stacks: (1, 1/k) for 1/k <= radius, plus (1, 0).
  for (int k = 1; k <= br.k_max; ++k) {
    const Vec y = vec2(1, 1.0 / k);
    const Scene& right = fan.base_points[fan.sectors[0].from][0] > 0 ? sub.n1 : sub.n2;
    CHECK((distance_to(right, y) == 0.0) == (1.0 / k <= sub.radius));
  }
  const auto arcs = check_fan(br.scene, fan);
  for (const SectorArc& a : arcs)
    for (const Vec& v : a.arc.vertices) CHECK(std::abs(v[0]) <= 1e-9);
  const JoinedArc j = join_arcs(arcs[0], arcs[1]);
  CHECK(j.turning_angle <= 1e-9);
  CHECK(j.arc.vertices.front()[1] * j.arc.vertices.back()[1] < 0);
}

TEST_CASE("sectors: Randers bisection in the fundamental-form sense") {
  const Scene scene = two_point_scene(Norm::randers(Mat::Identity(2, 2), vec2(0.3, 0.2)));
  // Locate a singular point on the segment between the two points.
  double lo = 0.0, hi = 1.0;
  const Vec q1 = vec2(1, 0), q2 = vec2(-1, 0);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    const Vec x = q1 + m * (q2 - q1);
    (scene.norm()(x - q1) < scene.norm()(x - q2) ? lo : hi) = m;
  }
  const SectorFan fan = sectors_at(scene, q1 + lo * (q2 - q1));
  REQUIRE(fan.sectors.size() == 2);
  check_fan(scene, fan);
}

TEST_CASE("sectors: circle center is isolated") {
  const Scene circle(Norm::euclidean(2), {CircularArc{vec2(0, 0), 1.0, 0.0, 2 * kPi}});
  const SectorFan fan = sectors_at(circle, vec2(0, 0));
  CHECK(fan.isolated);
  CHECK(fan.sectors.empty());
}
