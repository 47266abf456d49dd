#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "medial/propagate.hpp"

namespace medial {

namespace {

// Cube corners are numbered by bits (x, y, z); each permutation of the axes
// gives one tetrahedron of the Kuhn split along the 0-7 diagonal.
constexpr std::array<std::array<int, 4>, 6> kTets = {{
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
}};

Vec closest_on_segment(const Vec& a, const Vec& b, const Vec& p) {
  const Vec d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return a + t * d;
}

// Closest point on triangle abc (Ericson, Real-Time Collision Detection 5.1.5).
Vec closest_on_triangle(const Vec& p, const Vec& a, const Vec& b, const Vec& c) {
  const Vec ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0)
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = va + vb + vc;
  if (!(std::abs(denom) > 0)) {
    // Degenerate triangle: fall back to its edges.
    Vec best = closest_on_segment(a, b, p);
    for (const Vec& q : {closest_on_segment(b, c, p), closest_on_segment(a, c, p)})
      if ((q - p).norm() < (best - p).norm()) best = q;
    return best;
  }
  return a + ab * (vb / denom) + ac * (vc / denom);
}

CleavingReport cleave(const SplitPair& pair, const std::vector<SingularSample>& samples, double h,
                      const auto& distance) {
  CleavingReport rep;
  rep.bound = 0.5 * pair.rad;
  for (const SingularSample& s : samples) {
    if ((s.point - pair.p).norm() > pair.delta) continue;
    ++rep.inside;
    if (distance(s.point) <= 2.0 * h) continue;
    rep.off_arc.push_back(s);
    rep.max_off_rad = std::max(rep.max_off_rad, s.rad);
    if (s.rad > rep.bound * (1.0 + 1e-6)) rep.pass = false;
  }
  return rep;
}

}  // namespace

double distance_to_polyline(const std::vector<Vec>& vertices, const Vec& p) {
  if (vertices.empty()) return std::numeric_limits<double>::infinity();
  double best = (vertices[0] - p).norm();
  for (size_t i = 1; i < vertices.size(); ++i)
    best = std::min(best, (closest_on_segment(vertices[i - 1], vertices[i], p) - p).norm());
  return best;
}

double distance_to_mesh(const TracedSurface& surface, const Vec& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : surface.triangles) {
    const Vec q = closest_on_triangle(p, surface.vertices[t[0]], surface.vertices[t[1]],
                                      surface.vertices[t[2]]);
    best = std::min(best, (q - p).norm());
  }
  return best;
}

TracedSurface extract_surface_3d(const SplitPair& pair, int resolution) {
  if (pair.p.size() != 3) throw InvalidInput("extract_surface_3d needs a pair in R^3");
  if (!(pair.delta > 0)) throw InvalidInput("extract_surface_3d: delta not estimated");
  if (resolution < 1) throw InvalidInput("extract_surface_3d: resolution must be positive");
  // An odd count keeps p at a cell center, away from symmetric node planes.
  const int n = resolution % 2 == 1 ? resolution : resolution + 1;
  const int nn = n + 1;
  const double step = 2.0 * pair.delta / n;
  const Vec lo = pair.p.array() - pair.delta;

  auto node_pos = [&](int i, int j, int k) { return Vec(lo + step * vec3(i, j, k)); };
  auto node_id = [&](int i, int j, int k) { return (long(i) * nn + j) * nn + k; };
  std::vector<double> values(size_t(nn) * nn * nn);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < nn; ++k) values[node_id(i, j, k)] = f_eval(pair, node_pos(i, j, k));

  TracedSurface out;
  out.p = pair.p;
  out.delta = pair.delta;
  std::unordered_map<long long, int> edge_vertex;
  const long long total = (long long)nn * nn * nn;

  auto crossing = [&](long u, Vec pu, long v, Vec pv) {
    if (u > v) {
      std::swap(u, v);
      std::swap(pu, pv);
    }
    const long long key = (long long)u * total + v;
    if (auto it = edge_vertex.find(key); it != edge_vertex.end()) return it->second;
    double fu = values[u];
    Vec x;
    double fx;
    if (fu == 0.0) {
      x = pu;
      fx = 0.0;
    } else if (values[v] == 0.0) {
      x = pv;
      fx = 0.0;
    } else {
      Vec a = pu, b = pv;
      x = 0.5 * (a + b);
      fx = f_eval(pair, x);
      for (int it = 0; it < 100 && std::abs(fx) >= 1e-9; ++it) {
        if ((fx >= 0) == (fu >= 0)) {
          a = x;
          fu = fx;
        } else {
          b = x;
        }
        x = 0.5 * (a + b);
        fx = f_eval(pair, x);
      }
    }
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(x);
    out.residual.push_back(std::abs(fx));
    edge_vertex.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        std::array<long, 8> ids;
        std::array<Vec, 8> pos;
        for (int c = 0; c < 8; ++c) {
          const int a = i + (c & 1), b = j + ((c >> 1) & 1), d = k + ((c >> 2) & 1);
          ids[c] = node_id(a, b, d);
          pos[c] = node_pos(a, b, d);
        }
        for (const auto& tet : kTets) {
          std::array<int, 4> in, out_;
          int n_in = 0, n_out = 0;
          for (int c : tet) (values[ids[c]] >= 0 ? in[n_in++] : out_[n_out++]) = c;
          auto cut = [&](int a, int b) { return crossing(ids[a], pos[a], ids[b], pos[b]); };
          if (n_in == 1 || n_in == 3) {
            const int lone = n_in == 1 ? in[0] : out_[0];
            const auto& rest = n_in == 1 ? out_ : in;
            tris.push_back({cut(lone, rest[0]), cut(lone, rest[1]), cut(lone, rest[2])});
          } else if (n_in == 2) {
            const int a = cut(in[0], out_[0]), b = cut(in[0], out_[1]);
            const int c = cut(in[1], out_[1]), d = cut(in[1], out_[0]);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
          }
        }
      }

  for (const auto& t : tris) {
    bool inside = true;
    for (int v : t) inside = inside && (out.vertices[v] - pair.p).norm() <= pair.delta;
    if (inside) out.triangles.push_back(t);
  }
  if (out.triangles.empty())
    throw NumericalError("extract_surface_3d: empty zero set in B_delta(p)");

  // Drop vertices only referenced by discarded triangles.
  std::vector<int> remap(out.vertices.size(), -1);
  TracedSurface kept;
  kept.p = out.p;
  kept.delta = out.delta;
  for (auto t : out.triangles) {
    for (int& v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(kept.vertices.size());
        kept.vertices.push_back(out.vertices[v]);
        kept.residual.push_back(out.residual[v]);
      }
      v = remap[v];
    }
    kept.triangles.push_back(t);
  }
  return kept;
}

CleavingReport cleaving_check(const SplitPair& pair, const TracedArc& arc,
                              const std::vector<SingularSample>& samples, double h) {
  return cleave(pair, samples, h, [&](const Vec& y) { return distance_to_polyline(arc.vertices, y); });
}

CleavingReport cleaving_check(const SplitPair& pair, const TracedSurface& surface,
                              const std::vector<SingularSample>& samples, double h) {
  return cleave(pair, samples, h, [&](const Vec& y) { return distance_to_mesh(surface, y); });
}

}  // namespace medial
