#pragma once

#include <optional>
#include <vector>

#include "medial/propagate.hpp"
#include "medial/singular.hpp"

namespace medial {

/// Angular gap at p between two consecutive segment directions, swept
/// counterclockwise from `from` to `to`.
struct Sector {
  int index = 0;
  int from = 0;
  int to = 0;
  double start_angle = 0.0;
  double gap = 0.0;
};

/// Directions of the segments from p to its base points, cyclically sorted
/// by angle in the Euclidean chart, and the sectors between them.
struct SectorFan {
  Vec p;
  double delta0 = 0.0;
  std::vector<double> angles;
  std::vector<Vec> base_points;
  std::vector<Sector> sectors;
  /// The projection is a continuum (e.g. the center of a circle): no sectors.
  bool isolated = false;

  bool one_sided() const { return sectors.size() == 1; }
};

/// delta0 <= 0 picks min(d_N(p)/2, rad/2). Throws InvalidInput when p is not
/// singular or the scene is not planar.
SectorFan sectors_at(const Scene& scene, const Vec& p, double delta0 = 0.0);

struct SubarcPair {
  Scene n1, n2;
  double radius = 0.0;
};

/// Pieces of N around the two base points bounding the sector, clipped at
/// `radius` (default rad/4) and halved until disjoint with p projecting
/// uniquely onto each. NumericalError after 20 halvings.
SubarcPair sector_subarcs(const Scene& scene, const SectorFan& fan, const Sector& sector,
                          double radius = 0.0);

struct SectorArc {
  Sector sector;
  Vec p;
  SubarcPair parts;
  TracedArc arc;
  /// Unit tangent at p with omega_1(v) = omega_2(v), pointing into the sector.
  Vec tangent;
  double omega_gap = 0.0;
  /// Angle of the tangent measured from the sector's start direction.
  double tangent_offset = 0.0;
};

SectorArc sector_arc(const Scene& scene, const SectorFan& fan, const Sector& sector,
                     const TraceOptions& options = {});

struct JoinedArc {
  TracedArc arc;
  /// Pi minus the angle between the two tangents; zero for a straight join.
  double turning_angle = 0.0;
  /// The incoming and outgoing tangents lie in a common open half-plane.
  bool graphical = false;
};

/// Reverses `a` and appends `b` through the shared base point. Throws
/// InvalidInput for different base points or the same sector.
JoinedArc join_arcs(const SectorArc& a, const SectorArc& b);

}  // namespace medial
