#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "medial/scene.hpp"
#include "medial/singular.hpp"

namespace medial {

/// N1, N2: the parts of N near the two nearest points q1, q2 of a Sigma_2
/// point p, i.e. N intersected with dist_max-balls of radius rad/4.
struct SplitPair {
  Scene n1, n2;
  Vec q1, q2;
  Vec p;
  double rad = 0.0;
  /// Validated radius delta(p); zero until estimate_delta has run.
  double delta = 0.0;
};

/// Throws InvalidInput unless the sample has exactly two clusters.
SplitPair split(const Scene& scene, const SingularSample& sample);

/// f = d_{N1} - d_{N2}.
double f_eval(const SplitPair& pair, const Vec& x);

struct DeltaOptions {
  int n_dirs = 64;
  int n_radii = 8;
  int max_halvings = 20;
  ProjectionOptions projection;
};

/// Largest r in rad/2, rad/4, ..., rad/2^max_halvings with r < d_N(p) and
/// every sampled projection cluster in B_r(p) lying in N1 u N2 (within sep);
/// returns r/2. Balls are Euclidean. Throws NumericalError when no radius
/// passes.
double estimate_delta(const Scene& scene, const SplitPair& pair, const DeltaOptions& options = {});

/// Same test for an arbitrary family of parts around p (used for k >= 3).
double estimate_delta_parts(const Scene& scene, const Vec& p, double rad,
                            const std::vector<Scene>& parts, const DeltaOptions& options = {});

enum class Termination {
  /// The arc starts at the seed (one-sided trace).
  Seed,
  LeftBall,
  LeftWindow,
  GradientDegenerate,
  ProjectionEscaped,
  StepLimit,
  CorrectorFailed,
};

const char* to_string(Termination t);

struct TraceOptions {
  /// Step size; zero means delta / 200.
  double h = 0.0;
  double tol = 1e-10;
  double eps_g = 1e-4;
  long step_limit = 100000;
  int newton_iterations = 20;
  /// Radius of the Euclidean ball around p the trace stays in; zero means
  /// delta, infinity disables the check.
  double radius = 0.0;
  /// Optional extra stopping region.
  std::optional<Box> window;
  /// Stop when a vertex's projection leaves N1 u N2.
  bool check_projection = true;
  /// Trace only the half of the curve leaving p along this side.
  std::optional<Vec> direction;
};

/// Polyline approximation of a propagated zero set through p.
struct TracedArc {
  int dim = 2;
  std::vector<Vec> vertices;
  std::vector<double> residual;
  std::vector<double> grad_mag;
  /// Reasons the trace stopped at the first and at the last vertex.
  Termination start_reason = Termination::StepLimit;
  Termination end_reason = Termination::StepLimit;
  double h = 0.0;
  /// Index of the seed vertex (closest to p).
  size_t seed_index = 0;
};

/// Predictor-corrector continuation of f = 0 from p in both directions.
/// Throws InvalidInput unless m = 2 and pair.delta > 0 (or options fix both
/// h and radius); NumericalError when the corrector fails at the seed.
TracedArc trace_arc_2d(const Scene& scene, const SplitPair& pair, const TraceOptions& options = {});

struct TracedSurface {
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> residual;
  Vec p;
  double delta = 0.0;
};

/// Marching-tetrahedra zero set of f on a grid of `resolution` cells per
/// axis (rounded up to odd) over the cube around B_delta(p); crossings are
/// bisected to |f| < 1e-9 and triangles leaving the ball are dropped.
/// Throws NumericalError if nothing remains.
TracedSurface extract_surface_3d(const SplitPair& pair, int resolution = 33);

struct CleavingReport {
  bool pass = true;
  double bound = 0.0;
  int inside = 0;
  /// Samples in B_delta(p) further than 2h from the traced set.
  std::vector<SingularSample> off_arc;
  double max_off_rad = 0.0;
};

/// Checks rad(y) <= rad(p)/2 (1 + 1e-6) for every sample y in B_delta(p)
/// further than 2h from the traced set.
CleavingReport cleaving_check(const SplitPair& pair, const TracedArc& arc,
                              const std::vector<SingularSample>& samples, double h);
CleavingReport cleaving_check(const SplitPair& pair, const TracedSurface& surface,
                              const std::vector<SingularSample>& samples, double h);

double distance_to_polyline(const std::vector<Vec>& vertices, const Vec& p);
double distance_to_mesh(const TracedSurface& surface, const Vec& p);

struct CoverOptions {
  double h = 1.0 / 512;
  OracleOptions oracle;
  ClassifyOptions classify;
  DeltaOptions delta;
  /// Trace parameters; radius and window are set by cover itself.
  TraceOptions trace;
  /// Upper bound on the trace step; zero means h / 2.
  double max_trace_step = 0.0;
};

/// Sampled Sigma_2 points with rad_K/(i+1) < rad <= rad_K/i and minimal j
/// such that delta >= 1/j.
struct CoverStratum {
  int i = 0;
  int j = 0;
  std::vector<SingularSample> samples;
};

struct CoverArc {
  TracedArc arc;
  SingularSample seed;
  int stratum_i = 0;
  int stratum_j = 0;
  double delta = 0.0;
};

struct ResidualSample {
  SingularSample sample;
  std::string reason;
};

struct CoverReport {
  double rad_k = 0.0;
  std::vector<CoverArc> arcs;
  /// Ordered by (i, j).
  std::vector<CoverStratum> strata;
  std::vector<ResidualSample> residual;
  int sigma2_samples = 0;
  int covered = 0;
  long iteration_cap = 0;
  bool cap_hit = false;
  double h = 0.0;
};

/// Greedy stratified covering of the sampled Sigma_2 in the window.
CoverReport cover(const Scene& scene, const Box& window, const CoverOptions& options = {});

struct Codim2Options {
  TraceOptions trace;
  DeltaOptions delta;
  double simplex_tol = 1e-7;
};

/// Continuation of {f1 = 0} n {f2 = 0} in R^3 from a point with three
/// clusters whose base points span a triangle. Stops where a vertex no longer
/// has three clusters in the parts.
TracedArc trace_codim2_3d(const Scene& scene, const SingularSample& sample,
                          const Codim2Options& options = {});

}  // namespace medial
