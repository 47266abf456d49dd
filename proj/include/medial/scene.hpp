#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "medial/norm.hpp"

namespace medial {

struct PointSet {
  std::vector<Vec> points;
  bool operator==(const PointSet&) const = default;
};

struct Segment {
  Vec a, b;
  bool operator==(const Segment&) const = default;
};

struct Polyline {
  std::vector<Vec> vertices;
  bool operator==(const Polyline&) const = default;
};

/// Planar arc {center + radius (cos t, sin t) : theta0 <= t <= theta1}.
struct CircularArc {
  Vec center;
  double radius = 1.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  bool operator==(const CircularArc&) const = default;
};

using Primitive = std::variant<PointSet, Segment, Polyline, CircularArc>;

/// Axis-aligned box, used both for windows and for pruning.
struct Box {
  Vec lo, hi;

  bool contains(const Vec& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  /// Euclidean distance from p to the box (0 inside).
  double distance(const Vec& p) const {
    return (lo - p).cwiseMax(p - hi).cwiseMax(0.0).norm();
  }
};

/// Closed set N given as a finite union of bounded primitives, together with
/// the norm that measures distances to it. Immutable after construction.
class Scene {
 public:
  /// Flattened primitive piece: a point, a segment, or an arc spanning at
  /// most a quarter turn.
  struct Element {
    enum class Kind { Point, Segment, Arc };
    Kind kind = Kind::Point;
    Vec a, b;  // endpoints; for arcs `a` is the center and `b` the start point
    double radius = 0.0, theta0 = 0.0, theta1 = 0.0;
    Box box;
  };

  /// Throws InvalidInput on an empty primitive list, dimension mismatches,
  /// non-finite data, repeated consecutive polyline vertices, or bad arcs.
  Scene(Norm norm, std::vector<Primitive> primitives);

  const Norm& norm() const { return norm_; }
  int dim() const { return norm_.dim(); }
  const std::vector<Primitive>& primitives() const { return primitives_; }
  const std::vector<Element>& elements() const { return elements_; }
  const Box& bounds() const { return bounds_; }

  bool operator==(const Scene& o) const {
    return norm_ == o.norm_ && primitives_ == o.primitives_;
  }

 private:
  Norm norm_;
  std::vector<Primitive> primitives_;
  std::vector<Element> elements_;
  Box bounds_;
};

struct ProjectionOptions {
  /// Relative slack accepting q as a near-minimizer: F(p - q) <= d (1 + eta_d).
  double eta_d = 1e-9;
  /// Clustering threshold in dist_max, relative to d_N(p).
  double sep_rel = 1e-6;
  int max_clusters = 16;
};

struct Cluster {
  Vec representative;
  /// Unit direction (p - q) / F(p - q) of the segment arriving at p.
  Vec direction;
  /// dF at the direction; the differential of d_N contributed by the segment.
  Covector covector;
  double distance = 0.0;
  std::vector<Vec> members;
};

/// Near-minimizers of q -> F(p - q) over N, grouped into clusters keyed by
/// base point. In a Minkowski space a base point determines its segment, so
/// the cluster list stands for both the point and the segment projections.
struct ProjectionSet {
  Vec query;
  double distance = 0.0;
  std::vector<Cluster> clusters;
  /// More clusters than ProjectionOptions::max_clusters; `clusters` is
  /// truncated and the fiber is treated as a continuum.
  bool overflow = false;
  double eta_d = 0.0;
  double sep = 0.0;
};

struct NearestPoint {
  double distance;
  Vec point;
};

/// d_N(p) = min over q in N of F(p - q). Zero when p lies in N.
double distance_to(const Scene& scene, const Vec& p);

/// One minimizer of q -> F(p - q). Ties are broken by element order.
NearestPoint nearest(const Scene& scene, const Vec& p);

/// All minimizers of q -> F(p - q) up to relative slack eta, best first,
/// keeping at most four. Lets grid scans see exact ties symmetrically.
struct NearestSet {
  double distance = 0.0;
  std::array<Vec, 4> points;
  int count = 0;
};

NearestSet nearest_set(const Scene& scene, const Vec& p, double eta = 1e-12);

/// Throws InvalidInput when d_N(p) == 0.
ProjectionSet project(const Scene& scene, const Vec& p, const ProjectionOptions& options = {});

/// N intersected with {y : dist_max(center, y) <= radius}; nullopt when that
/// intersection is empty. Segments and arcs are clipped by bisection on the
/// curve parameter.
std::optional<Scene> clip_by_ball(const Scene& scene, const Vec& center, double radius);

/// All sample points of a primitive at roughly `spacing` (endpoints included);
/// used by renderers and by tests that need points on N.
std::vector<Vec> sample_primitive(const Primitive& primitive, double spacing);

/// Minimizes a unimodal function on [lo, hi] by golden-section search and
/// returns the argmin.
template <class F>
double golden_section(F&& f, double lo, double hi, int iterations = 80) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace medial
