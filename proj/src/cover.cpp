#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <unordered_map>

#include "medial/parallel.hpp"
#include "medial/propagate.hpp"

namespace medial {

namespace {

// Segments of a planar polyline bucketed on a square grid, for repeated
// "within r of the arc" queries.
class SegmentIndex {
 public:
  SegmentIndex(const std::vector<Vec>& verts, double cell) : verts_(verts), cell_(cell) {
    for (size_t i = 0; i < segments(); ++i) {
      const Vec& a = verts[i];
      const Vec& b = verts[std::min(i + 1, verts.size() - 1)];
      const auto [x0, y0] = key(a.cwiseMin(b));
      const auto [x1, y1] = key(a.cwiseMax(b));
      for (long x = x0; x <= x1; ++x)
        for (long y = y0; y <= y1; ++y) buckets_[pack(x, y)].push_back(i);
    }
  }

  double distance(const Vec& p, double cutoff) const {
    double best = std::numeric_limits<double>::infinity();
    const long reach = static_cast<long>(std::ceil(cutoff / cell_));
    const auto [cx, cy] = key(p);
    for (long x = cx - reach; x <= cx + reach; ++x)
      for (long y = cy - reach; y <= cy + reach; ++y) {
        auto it = buckets_.find(pack(x, y));
        if (it == buckets_.end()) continue;
        for (size_t i : it->second) {
          const Vec& a = verts_[i];
          const Vec& b = verts_[std::min(i + 1, verts_.size() - 1)];
          best = std::min(best, distance_to_polyline({a, b}, p));
        }
      }
    return best;
  }

 private:
  size_t segments() const { return verts_.size() <= 1 ? verts_.size() : verts_.size() - 1; }
  std::pair<long, long> key(const Vec& p) const {
    return {static_cast<long>(std::floor(p[0] / cell_)), static_cast<long>(std::floor(p[1] / cell_))};
  }
  static long long pack(long x, long y) { return (static_cast<long long>(x) << 32) ^ (y & 0xffffffffLL); }

  const std::vector<Vec>& verts_;
  double cell_;
  std::unordered_map<long long, std::vector<size_t>> buckets_;
};

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

}  // namespace

CoverReport cover(const Scene& scene, const Box& window, const CoverOptions& options) {
  if (scene.dim() != 2) throw InvalidInput("cover works on planar scenes");
  CoverReport report;
  report.h = options.h;
  const double h = options.h;

  const OracleGrid grid = oracle_scan(scene, window, h, options.oracle);
  std::vector<SingularSample> samples = refine_flagged(scene, grid, options.classify);

  std::vector<SingularSample> sigma2;
  for (SingularSample& s : samples) {
    if (!window.contains(s.point)) continue;
    report.rad_k = std::max(report.rad_k, s.rad);
    if (s.overflow()) {
      report.residual.push_back({std::move(s), "fiber overflow"});
    } else if (s.k >= 3) {
      report.residual.push_back({std::move(s), "multiplicity k>=3"});
    } else {
      sigma2.push_back(std::move(s));
    }
  }
  report.sigma2_samples = static_cast<int>(sigma2.size());
  if (sigma2.empty()) return report;

  // delta(p) for every sample; the strata need it before any tracing starts.
  const long n = static_cast<long>(sigma2.size());
  std::vector<double> delta(n, 0.0);
  std::vector<std::string> failure(n);
  parallel_for(n, [&](long i) {
    try {
      delta[i] = estimate_delta(scene, split(scene, sigma2[i]), options.delta);
    } catch (const std::exception& e) {
      failure[i] = e.what();
    }
  });

  std::vector<int> si(n, 0), sj(n, 0);
  // A sample stops being a pick candidate once it has a reason; it can still
  // be covered by a later arc, which clears the reason.
  std::vector<char> done(n, 0), covered(n, 0);
  std::vector<std::string> reason(n);
  std::map<std::pair<int, int>, std::vector<long>> strata;
  int j_max = 1;
  for (long i = 0; i < n; ++i) {
    if (!failure[i].empty()) {
      reason[i] = "delta estimation failed: " + failure[i];
      done[i] = 1;
      continue;
    }
    si[i] = std::max(1, static_cast<int>(std::floor(report.rad_k / sigma2[i].rad)));
    sj[i] = std::max(1, static_cast<int>(std::ceil(1.0 / delta[i] - 1e-12)));
    j_max = std::max(j_max, sj[i]);
    strata[{si[i], sj[i]}].push_back(i);
  }
  for (const auto& [key, members] : strata) {
    CoverStratum st;
    st.i = key.first;
    st.j = key.second;
    for (long m : members) st.samples.push_back(sigma2[m]);
    report.strata.push_back(std::move(st));
  }

  const Vec extent = window.hi - window.lo;
  const double area = extent[0] * extent[1];
  report.iteration_cap =
      static_cast<long>(std::ceil(area / (std::numbers::pi / (double(j_max) * j_max)))) + 1;

  const double max_step = options.max_trace_step > 0 ? options.max_trace_step : 0.5 * h;
  for (const auto& [key, members] : strata) {
    long picks = 0;
    for (;;) {
      std::optional<long> best;
      for (long m : members) {
        if (done[m] || covered[m]) continue;
        if (!best || sigma2[m].rad > sigma2[*best].rad ||
            (sigma2[m].rad == sigma2[*best].rad && lex_less(sigma2[m].point, sigma2[*best].point)))
          best = m;
      }
      if (!best) break;
      if (picks >= report.iteration_cap) {
        report.cap_hit = true;
        for (long m : members)
          if (!done[m] && !covered[m]) {
            reason[m] = "iteration cap";
            done[m] = 1;
          }
        break;
      }
      ++picks;
      const long b = *best;
      SplitPair pair = split(scene, sigma2[b]);
      pair.delta = delta[b];
      TraceOptions topt = options.trace;
      topt.h = std::min(delta[b] / 200.0, max_step);
      topt.radius = std::numeric_limits<double>::infinity();
      topt.window = window;
      CoverArc ca;
      try {
        ca.arc = trace_arc_2d(scene, pair, topt);
      } catch (const NumericalError& e) {
        reason[b] = std::string("trace failed: ") + e.what();
        done[b] = 1;
        continue;
      }
      ca.seed = sigma2[b];
      ca.stratum_i = key.first;
      ca.stratum_j = key.second;
      ca.delta = delta[b];

      const SegmentIndex index(ca.arc.vertices, 2.0 * h);
      std::vector<char> hit(n, 0);
      parallel_for(n, [&](long m) {
        if (!covered[m]) hit[m] = index.distance(sigma2[m].point, 2.0 * h) <= 2.0 * h;
      });
      for (long m = 0; m < n; ++m)
        if (hit[m]) covered[m] = 1;
      if (!covered[b]) {
        reason[b] = "seed not on its traced arc";
        done[b] = 1;
      }
      // Same-stratum samples left inside B_delta with a large radius break
      // the cleaving bound; smaller ones wait for their own pick.
      for (long m : members) {
        if (done[m] || covered[m]) continue;
        if ((sigma2[m].point - pair.p).norm() > delta[b]) continue;
        if (sigma2[m].rad > 0.5 * pair.rad * (1.0 + 1e-6)) {
          reason[m] = "cleaving violation";
          done[m] = 1;
        }
      }
      report.arcs.push_back(std::move(ca));
    }
  }

  for (long m = 0; m < n; ++m) {
    if (covered[m]) {
      ++report.covered;
    } else {
      report.residual.push_back({sigma2[m], reason[m].empty() ? "uncovered" : reason[m]});
    }
  }
  return report;
}

}  // namespace medial
