#include "medial/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace medial {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kArcSamplesAtCenter = 33;

Vec on_circle(const Vec& c, double r, double t) { return c + r * vec2(std::cos(t), std::sin(t)); }

void require_point(const Vec& v, int dim, const char* what) {
  if (v.size() != dim) throw InvalidInput(std::string(what) + ": dimension mismatch");
  if (!v.allFinite()) throw InvalidInput(std::string(what) + ": non-finite coordinate");
}

Box box_of(const Vec& a, const Vec& b) { return {a.cwiseMin(b), a.cwiseMax(b)}; }

Scene::Element point_element(const Vec& a) {
  Scene::Element e;
  e.kind = Scene::Element::Kind::Point;
  e.a = e.b = a;
  e.box = box_of(a, a);
  return e;
}

Scene::Element segment_element(const Vec& a, const Vec& b) {
  if (a == b) return point_element(a);
  Scene::Element e;
  e.kind = Scene::Element::Kind::Segment;
  e.a = a;
  e.b = b;
  e.box = box_of(a, b);
  return e;
}

Scene::Element arc_element(const Vec& c, double r, double t0, double t1) {
  const Vec p0 = on_circle(c, r, t0), p1 = on_circle(c, r, t1);
  Scene::Element e;
  e.kind = Scene::Element::Kind::Arc;
  e.a = c;
  e.b = p0;
  e.radius = r;
  e.theta0 = t0;
  e.theta1 = t1;
  e.box = box_of(p0, p1);
  // Axis extremes hit at multiples of pi/2 inside [t0, t1].
  for (double k = std::ceil(t0 / (kPi / 2)); k * (kPi / 2) <= t1; k += 1.0) {
    const Vec q = on_circle(c, r, k * (kPi / 2));
    e.box.lo = e.box.lo.cwiseMin(q);
    e.box.hi = e.box.hi.cwiseMax(q);
  }
  return e;
}

struct Flattener {
  int dim;
  std::vector<Scene::Element>& out;

  void operator()(const PointSet& s) {
    if (s.points.empty()) throw InvalidInput("point set is empty");
    for (const Vec& p : s.points) {
      require_point(p, dim, "point");
      out.push_back(point_element(p));
    }
  }
  void operator()(const Segment& s) {
    require_point(s.a, dim, "segment");
    require_point(s.b, dim, "segment");
    out.push_back(segment_element(s.a, s.b));
  }
  void operator()(const Polyline& s) {
    if (s.vertices.size() < 2) throw InvalidInput("polyline needs at least two vertices");
    for (const Vec& v : s.vertices) require_point(v, dim, "polyline");
    for (size_t i = 1; i < s.vertices.size(); ++i) {
      if (s.vertices[i] == s.vertices[i - 1]) {
        throw InvalidInput("polyline has repeated consecutive vertices");
      }
      out.push_back(segment_element(s.vertices[i - 1], s.vertices[i]));
    }
  }
  void operator()(const CircularArc& s) {
    if (dim != 2) throw InvalidInput("circular arcs are planar");
    require_point(s.center, dim, "arc");
    if (!std::isfinite(s.radius) || !(s.radius > 0.0)) throw InvalidInput("arc radius must be > 0");
    if (!std::isfinite(s.theta0) || !std::isfinite(s.theta1) || !(s.theta1 >= s.theta0) ||
        s.theta1 - s.theta0 > 2 * kPi + 1e-12) {
      throw InvalidInput("arc needs theta0 <= theta1 <= theta0 + 2 pi");
    }
    const int pieces = std::max(1, static_cast<int>(std::ceil((s.theta1 - s.theta0) / (kPi / 2) - 1e-12)));
    const double step = (s.theta1 - s.theta0) / pieces;
    for (int i = 0; i < pieces; ++i) {
      const double t1 = i + 1 == pieces ? s.theta1 : s.theta0 + (i + 1) * step;
      out.push_back(arc_element(s.center, s.radius, s.theta0 + i * step, t1));
    }
  }
};

struct Candidate {
  Vec point;
  double distance;
};

// Minimizers of q -> F(p - q) over one element. More than one candidate is
// emitted only where the minimum may be attained at several places.
template <class Sink>
void element_candidates(const Scene::Element& e, const Norm& norm, const Vec& p, double eta,
                        Sink&& sink) {
  auto emit = [&](const Vec& q) { sink(q, norm(p - q)); };
  switch (e.kind) {
    case Scene::Element::Kind::Point:
      emit(e.a);
      return;
    case Scene::Element::Kind::Segment: {
      const Vec d = e.b - e.a;
      double t;
      if (norm.kind() != Norm::Kind::Randers) {
        const Vec md = norm.metric() * d;
        t = std::clamp(md.dot(p - e.a) / md.dot(d), 0.0, 1.0);
      } else {
        t = golden_section([&](double s) { return norm(p - e.a - s * d); }, 0.0, 1.0);
        const double g = norm(p - e.a - t * d);
        if (norm(p - e.a) <= g) t = 0.0;
        if (norm(p - e.b) < std::min(g, norm(p - e.a))) t = 1.0;
      }
      emit(t == 1.0 ? e.b : Vec(e.a + t * d));
      return;
    }
    case Scene::Element::Kind::Arc: {
      const Vec w = p - e.a;
      const double wn = w.norm();
      emit(on_circle(e.a, e.radius, e.theta0));
      emit(on_circle(e.a, e.radius, e.theta1));
      if (norm.kind() == Norm::Kind::Euclidean) {
        if (wn <= eta * e.radius) {
          // Query at the center: the whole piece is (nearly) equidistant.
          for (int i = 1; i + 1 < kArcSamplesAtCenter; ++i) {
            const double s = static_cast<double>(i) / (kArcSamplesAtCenter - 1);
            emit(on_circle(e.a, e.radius, e.theta0 + s * (e.theta1 - e.theta0)));
          }
          return;
        }
        double phi = std::atan2(w(1), w(0));
        while (phi < e.theta0) phi += 2 * kPi;
        while (phi - 2 * kPi >= e.theta0) phi -= 2 * kPi;
        if (phi <= e.theta1) emit(on_circle(e.a, e.radius, phi));
        return;
      }
      const double t = golden_section(
          [&](double s) { return norm(p - on_circle(e.a, e.radius, s)); }, e.theta0, e.theta1);
      emit(on_circle(e.a, e.radius, t));
      return;
    }
  }
}

thread_local std::vector<double> tl_bounds;

// Runs `visit` on every element whose lower bound does not exceed the running
// best by more than the slack factor. Returns the minimum distance.
template <class Visit>
double scan_elements(const Scene& scene, const Vec& p, double slack, Visit&& visit) {
  const auto& elems = scene.elements();
  const Norm& norm = scene.norm();
  auto& lb = tl_bounds;
  lb.resize(elems.size());
  // Pass 1: an upper bound from one point of each promising element.
  double upper = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < elems.size(); ++i) {
    lb[i] = norm.lower_ratio() * elems[i].box.distance(p);
    if (lb[i] < upper) upper = std::min(upper, norm(p - elems[i].b));
  }
  double best = std::numeric_limits<double>::infinity();
  const double cut = upper * slack;
  for (size_t i = 0; i < elems.size(); ++i) {
    if (lb[i] > cut) continue;
    best = std::min(best, visit(elems[i]));
  }
  return best;
}

}  // namespace

Scene::Scene(Norm norm, std::vector<Primitive> primitives)
    : norm_(std::move(norm)), primitives_(std::move(primitives)) {
  if (primitives_.empty()) throw InvalidInput("scene needs at least one primitive");
  Flattener flat{norm_.dim(), elements_};
  for (const Primitive& prim : primitives_) std::visit(flat, prim);
  bounds_ = elements_.front().box;
  for (const Element& e : elements_) {
    bounds_.lo = bounds_.lo.cwiseMin(e.box.lo);
    bounds_.hi = bounds_.hi.cwiseMax(e.box.hi);
  }
}

double distance_to(const Scene& scene, const Vec& p) { return nearest(scene, p).distance; }

NearestPoint nearest(const Scene& scene, const Vec& p) {
  if (p.size() != scene.dim()) throw InvalidInput("query dimension mismatch");
  NearestPoint best{std::numeric_limits<double>::infinity(), p};
  scan_elements(scene, p, 1.0, [&](const Scene::Element& e) {
    element_candidates(e, scene.norm(), p, 0.0, [&](const Vec& q, double d) {
      if (d < best.distance) best = {d, q};
    });
    return best.distance;
  });
  return best;
}

NearestSet nearest_set(const Scene& scene, const Vec& p, double eta) {
  if (p.size() != scene.dim()) throw InvalidInput("query dimension mismatch");
  std::array<double, 4> dist{};
  NearestSet out;
  out.distance = std::numeric_limits<double>::infinity();
  auto add = [&](const Vec& q, double d) {
    if (d > out.distance * (1 + eta)) return;
    for (int i = 0; i < out.count; ++i)
      if (out.points[i] == q) return;
    if (d < out.distance) {
      out.distance = d;
      int kept = 0;
      for (int i = 0; i < out.count; ++i) {
        if (dist[i] <= d * (1 + eta)) {
          out.points[kept] = out.points[i];
          dist[kept++] = dist[i];
        }
      }
      out.count = kept;
      // Best first.
      if (out.count < 4) ++out.count;
      for (int i = out.count - 1; i > 0; --i) {
        out.points[i] = out.points[i - 1];
        dist[i] = dist[i - 1];
      }
      out.points[0] = q;
      dist[0] = d;
    } else if (out.count < 4) {
      out.points[out.count] = q;
      dist[out.count++] = d;
    }
  };
  scan_elements(scene, p, 1.0 + eta, [&](const Scene::Element& e) {
    double local = std::numeric_limits<double>::infinity();
    element_candidates(e, scene.norm(), p, 0.0, [&](const Vec& q, double d) {
      add(q, d);
      local = std::min(local, d);
    });
    return local;
  });
  return out;
}

ProjectionSet project(const Scene& scene, const Vec& p, const ProjectionOptions& options) {
  if (p.size() != scene.dim()) throw InvalidInput("query dimension mismatch");
  const Norm& norm = scene.norm();
  std::vector<Candidate> cands;
  scan_elements(scene, p, 1.0 + options.eta_d, [&](const Scene::Element& e) {
    double local = std::numeric_limits<double>::infinity();
    element_candidates(e, norm, p, options.eta_d, [&](const Vec& q, double d) {
      cands.push_back({q, d});
      local = std::min(local, d);
    });
    return local;
  });
  double dmin = std::numeric_limits<double>::infinity();
  for (const Candidate& c : cands) dmin = std::min(dmin, c.distance);
  if (!(dmin > 0.0)) throw InvalidInput("projection undefined for a point of N");

  ProjectionSet out;
  out.query = p;
  out.distance = dmin;
  out.eta_d = options.eta_d;
  out.sep = options.sep_rel * dmin;
  const double accept = dmin * (1.0 + options.eta_d);
  std::erase_if(cands, [&](const Candidate& c) { return c.distance > accept; });
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return std::lexicographical_compare(a.point.begin(), a.point.end(), b.point.begin(),
                                        b.point.end());
  });
  for (const Candidate& c : cands) {
    auto hit = std::find_if(out.clusters.begin(), out.clusters.end(), [&](const Cluster& k) {
      return dist_max(norm, k.representative, c.point) <= out.sep;
    });
    if (hit != out.clusters.end()) {
      hit->members.push_back(c.point);
      continue;
    }
    Cluster k;
    k.representative = c.point;
    k.distance = c.distance;
    k.direction = (p - c.point) / c.distance;
    k.covector = differential(norm, p - c.point);
    k.members.push_back(c.point);
    out.clusters.push_back(std::move(k));
  }
  if (static_cast<int>(out.clusters.size()) > options.max_clusters) {
    out.overflow = true;
    out.clusters.resize(options.max_clusters);
  }
  return out;
}

namespace {

// Sublevel interval {t : g(t) <= r} of a convex g on [0, 1], or nothing.
std::optional<std::pair<double, double>> convex_sublevel(const auto& g, double r) {
  const double tm = golden_section(g, 0.0, 1.0);
  double lo_val = g(0.0), hi_val = g(1.0);
  double tmin = tm;
  if (lo_val <= g(tmin)) tmin = 0.0;
  if (hi_val <= g(tmin)) tmin = 1.0;
  if (g(tmin) > r) return std::nullopt;
  auto boundary = [&](double inside, double outside) {
    for (int i = 0; i < 64; ++i) {
      const double mid = 0.5 * (inside + outside);
      (g(mid) <= r ? inside : outside) = mid;
    }
    return inside;
  };
  const double a = lo_val <= r ? 0.0 : boundary(tmin, 0.0);
  const double b = hi_val <= r ? 1.0 : boundary(tmin, 1.0);
  return std::pair{a, b};
}

void push_segment_piece(std::vector<Primitive>& out, const Vec& a, const Vec& d, double t0,
                        double t1) {
  const Vec p0 = t0 == 0.0 ? a : Vec(a + t0 * d);
  const Vec p1 = t1 == 1.0 ? Vec(a + d) : Vec(a + t1 * d);
  if (p0 == p1) {
    out.push_back(PointSet{{p0}});
  } else {
    out.push_back(Segment{p0, p1});
  }
}

void clip_segment(std::vector<Primitive>& out, const Norm& norm, const Vec& a, const Vec& b,
                  const Vec& q, double r) {
  const Vec d = b - a;
  auto g = [&](double t) { return dist_max(norm, q, Vec(a + t * d)); };
  if (auto iv = convex_sublevel(g, r)) {
    if (iv->first == 0.0 && iv->second == 1.0) {
      out.push_back(Segment{a, b});
    } else {
      push_segment_piece(out, a, d, iv->first, iv->second);
    }
  }
}

void clip_arc(std::vector<Primitive>& out, const Norm& norm, const CircularArc& arc, const Vec& q,
              double r) {
  constexpr int n = 512;
  const double span = arc.theta1 - arc.theta0;
  auto theta = [&](double s) { return arc.theta0 + s * span; };
  auto g = [&](double s) { return dist_max(norm, q, on_circle(arc.center, arc.radius, theta(s))); };
  std::vector<double> val(n + 1);
  for (int i = 0; i <= n; ++i) val[i] = g(static_cast<double>(i) / n);
  // Dips below r that fall between samples: refine each sampled local minimum.
  std::vector<double> dip(n + 1, -1.0);
  for (int i = 0; i <= n; ++i) {
    if (val[i] <= r) continue;
    const bool left_up = i == 0 || val[i - 1] >= val[i];
    const bool right_up = i == n || val[i + 1] >= val[i];
    if (!left_up || !right_up) continue;
    const double lo = std::max(0, i - 1) / static_cast<double>(n);
    const double hi = std::min(n, i + 1) / static_cast<double>(n);
    const double s = golden_section(g, lo, hi);
    if (g(s) <= r) dip[i] = s;
  }
  auto edge = [&](double inside, double outside) {
    for (int i = 0; i < 64; ++i) {
      const double mid = 0.5 * (inside + outside);
      (g(mid) <= r ? inside : outside) = mid;
    }
    return inside;
  };
  auto emit = [&](double s0, double s1) {
    const double t0 = s0 == 0.0 ? arc.theta0 : theta(s0);
    const double t1 = s1 == 1.0 ? arc.theta1 : theta(s1);
    if (t1 > t0) {
      out.push_back(CircularArc{arc.center, arc.radius, t0, t1});
    } else {
      out.push_back(PointSet{{on_circle(arc.center, arc.radius, t0)}});
    }
  };
  int i = 0;
  while (i <= n) {
    if (dip[i] >= 0.0) {
      const double s = dip[i];
      emit(edge(s, std::max(0, i - 1) / static_cast<double>(n)),
           edge(s, std::min(n, i + 1) / static_cast<double>(n)));
      ++i;
      continue;
    }
    if (val[i] > r) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 <= n && val[j + 1] <= r) ++j;
    const double s0 = i == 0 ? 0.0 : edge(i / static_cast<double>(n), (i - 1) / static_cast<double>(n));
    const double s1 = j == n ? 1.0 : edge(j / static_cast<double>(n), (j + 1) / static_cast<double>(n));
    emit(s0, s1);
    i = j + 1;
  }
}

}  // namespace

std::optional<Scene> clip_by_ball(const Scene& scene, const Vec& center, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("clip radius must be > 0");
  if (center.size() != scene.dim()) throw InvalidInput("clip center dimension mismatch");
  const Norm& norm = scene.norm();
  std::vector<Primitive> out;
  for (const Primitive& prim : scene.primitives()) {
    if (const auto* ps = std::get_if<PointSet>(&prim)) {
      PointSet kept;
      for (const Vec& y : ps->points) {
        if (dist_max(norm, center, y) <= radius) kept.points.push_back(y);
      }
      if (!kept.points.empty()) out.push_back(std::move(kept));
    } else if (const auto* seg = std::get_if<Segment>(&prim)) {
      clip_segment(out, norm, seg->a, seg->b, center, radius);
    } else if (const auto* pl = std::get_if<Polyline>(&prim)) {
      for (size_t i = 1; i < pl->vertices.size(); ++i) {
        clip_segment(out, norm, pl->vertices[i - 1], pl->vertices[i], center, radius);
      }
    } else {
      clip_arc(out, norm, std::get<CircularArc>(prim), center, radius);
    }
  }
  if (out.empty()) return std::nullopt;
  return Scene(norm, std::move(out));
}

std::vector<Vec> sample_primitive(const Primitive& primitive, double spacing) {
  std::vector<Vec> out;
  auto segment = [&](const Vec& a, const Vec& b, bool first) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
    for (int i = first ? 0 : 1; i <= n; ++i) out.push_back(a + (b - a) * (double(i) / n));
  };
  if (const auto* ps = std::get_if<PointSet>(&primitive)) {
    out = ps->points;
  } else if (const auto* seg = std::get_if<Segment>(&primitive)) {
    segment(seg->a, seg->b, true);
  } else if (const auto* pl = std::get_if<Polyline>(&primitive)) {
    for (size_t i = 1; i < pl->vertices.size(); ++i) segment(pl->vertices[i - 1], pl->vertices[i], i == 1);
  } else {
    const auto& arc = std::get<CircularArc>(primitive);
    const double len = arc.radius * (arc.theta1 - arc.theta0);
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int i = 0; i <= n; ++i) {
      out.push_back(on_circle(arc.center, arc.radius, arc.theta0 + (arc.theta1 - arc.theta0) * i / n));
    }
  }
  return out;
}

}  // namespace medial
