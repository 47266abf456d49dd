#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "medial/scene.hpp"

namespace medial {

/// Multiplicity reported for fibers with more than max_clusters clusters.
inline constexpr int kOverflowMultiplicity = std::numeric_limits<int>::max();

struct ClassifyOptions {
  ProjectionOptions projection;
  /// Relative singular-value cutoff for conv_dim.
  double conv_tol = 1e-7;
};

/// A point of Sigma(N) with k >= 2 projection clusters.
struct SingularSample {
  Vec point;
  int k = 0;
  /// Max pairwise dist_max among cluster representatives.
  double rad = 0.0;
  /// Dimension of the convex hull of the cluster covectors.
  int conv_dim = 0;
  ProjectionSet projection;

  bool overflow() const { return k == kOverflowMultiplicity; }
};

/// nullopt when p has a single projection cluster. Throws InvalidInput on p in N.
std::optional<SingularSample> classify(const Scene& scene, const Vec& p,
                                       const ClassifyOptions& options = {});

/// rad_N over a finite sample; throws InvalidInput on an empty list.
double rad_of_region(std::span<const SingularSample> samples);

/// Rank of the centered covector set; singular values at or below
/// tol * max(largest singular value, largest covector entry) count as zero.
int conv_dim(std::span<const Covector> covectors, double tol = 1e-7);

/// Affine dimension of a point set with the same cutoff rule.
int affine_rank(std::span<const Vec> points, double tol = 1e-7);

struct OracleCell {
  /// Cell index (i, j[, k]); unused entries are 0.
  std::array<int, 3> index{};
  Vec center;
  /// Largest dist_max between nearest points across one of the cell's edges.
  double jump = 0.0;
  /// Number of distinct nearest points (clustered at the jump threshold)
  /// among the cell corners.
  int corner_clusters = 1;
};

struct OracleOptions {
  double c_jump = 8.0;
};

/// Brute-force picture of Sigma(N): grid nodes lo + h * index, a cell flagged
/// when two nodes joined by one of its edges have nearest points further than
/// c_jump * h apart in dist_max.
struct OracleGrid {
  Box window;
  double h = 0.0;
  int dim = 2;
  /// Number of cells along each axis.
  std::array<int, 3> cells{};
  double threshold = 0.0;
  /// Sorted by index (lexicographic, last axis fastest).
  std::vector<OracleCell> flagged;
};

/// Throws InvalidInput if the window's dimension is wrong, h is not positive,
/// or some grid node lies within 2h of N.
OracleGrid oracle_scan(const Scene& scene, const Box& window, double h,
                       const OracleOptions& options = {});

/// Bisects a jumping edge of the cell to the nearest-point discontinuity and
/// classifies there. nullopt when the jump turns out to be continuous drift.
std::optional<SingularSample> refine_cell(const Scene& scene, const OracleGrid& grid,
                                          const OracleCell& cell,
                                          const ClassifyOptions& options = {});

/// For cells whose corners see three or more distinct nearest points: Newton
/// solve for a common equidistant point of three of them near the cell.
std::optional<SingularSample> refine_junction(const Scene& scene, const OracleGrid& grid,
                                              const OracleCell& cell,
                                              const ClassifyOptions& options = {});

/// refine_cell over every flagged cell plus refine_junction over cells with
/// corner_clusters >= 3, in cell order. Duplicates are not removed.
std::vector<SingularSample> refine_flagged(const Scene& scene, const OracleGrid& grid,
                                           const ClassifyOptions& options = {});

/// Euclidean distance from p to the nearest flagged cell (as a box); infinity
/// when nothing is flagged.
double distance_to_flagged(const OracleGrid& grid, const Vec& p);

}  // namespace medial
