#include "medial/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace medial {

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InvalidInput(std::string("expected a number for ") + what);
  return j.get<double>();
}

Vec vec_from(const Json& j, int dim, const char* what) {
  if (!j.is_array() || (dim > 0 && static_cast<int>(j.size()) != dim) || j.size() < 2 || j.size() > 3)
    throw InvalidInput(std::string("bad coordinate array for ") + what);
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], what);
  return v;
}

Mat mat_from(const Json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) throw InvalidInput("bad norm matrix");
  Mat m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != dim) throw InvalidInput("bad norm matrix");
    for (int c = 0; c < dim; ++c) m(r, c) = number(j[r][c], "norm matrix");
  }
  return m;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

// First coordinate array found in a primitive, for dimension inference.
int primitive_dim(const Json& p) {
  for (const char* key : {"data", "vertices"})
    if (p.contains(key) && p[key].is_array() && !p[key].empty() && p[key][0].is_array())
      return static_cast<int>(p[key][0].size());
  for (const char* key : {"a", "center"})
    if (p.contains(key) && p[key].is_array()) return static_cast<int>(p[key].size());
  return 0;
}

Json arc_json(const TracedArc& arc) {
  Json v = Json::array();
  for (const Vec& x : arc.vertices) v.push_back(vec_json(x));
  return {{"h", arc.h},
          {"seed_index", arc.seed_index},
          {"start_reason", to_string(arc.start_reason)},
          {"end_reason", to_string(arc.end_reason)},
          {"max_residual", arc.residual.empty() ? 0.0
                                                : *std::max_element(arc.residual.begin(), arc.residual.end())},
          {"vertices", v}};
}

}  // namespace

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json norm_to_json(const Norm& norm) {
  switch (norm.kind()) {
    case Norm::Kind::Euclidean:
      return {{"kind", "euclidean"}, {"dim", norm.dim()}};
    case Norm::Kind::Quadratic:
      return {{"kind", "quadratic"}, {"M", mat_json(norm.metric())}};
    case Norm::Kind::Randers:
      return {{"kind", "randers"}, {"M", mat_json(norm.metric())}, {"b", vec_json(norm.drift())}};
  }
  return {};
}

Norm norm_from_json(const Json& j, int dim) {
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) throw InvalidInput("norm kind must be a string");
  const std::string k = kind.get<std::string>();
  if (j.contains("dim")) dim = static_cast<int>(number(j["dim"], "norm dim"));
  if (j.contains("M")) dim = static_cast<int>(j["M"].size());
  if (dim != 2 && dim != 3) throw InvalidInput("norm dimension must be 2 or 3");
  if (k == "euclidean") return Norm::euclidean(dim);
  if (k == "quadratic") return Norm::quadratic(mat_from(field(j, "M"), dim));
  if (k == "randers") return Norm::randers(mat_from(field(j, "M"), dim), vec_from(field(j, "b"), dim, "drift"));
  throw InvalidInput("unknown norm kind '" + k + "'");
}

Json scene_to_json(const Scene& scene) {
  Json prims = Json::array();
  for (const Primitive& p : scene.primitives()) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, PointSet>) {
            Json d = Json::array();
            for (const Vec& v : x.points) d.push_back(vec_json(v));
            prims.push_back({{"type", "points"}, {"data", d}});
          } else if constexpr (std::is_same_v<T, Segment>) {
            prims.push_back({{"type", "segment"}, {"a", vec_json(x.a)}, {"b", vec_json(x.b)}});
          } else if constexpr (std::is_same_v<T, Polyline>) {
            Json d = Json::array();
            for (const Vec& v : x.vertices) d.push_back(vec_json(v));
            prims.push_back({{"type", "polyline"}, {"vertices", d}});
          } else {
            prims.push_back({{"type", "arc"},
                             {"center", vec_json(x.center)},
                             {"r", x.radius},
                             {"theta0", x.theta0},
                             {"theta1", x.theta1}});
          }
        },
        p);
  }
  return {{"norm", norm_to_json(scene.norm())}, {"primitives", prims}};
}

Scene scene_from_json(const Json& j) {
  const Json& prims = field(j, "primitives");
  if (!prims.is_array() || prims.empty()) throw InvalidInput("scene needs a non-empty primitives array");
  const Norm norm = norm_from_json(field(j, "norm"), primitive_dim(prims[0]));
  const int dim = norm.dim();
  std::vector<Primitive> out;
  for (const Json& p : prims) {
    const Json& type = field(p, "type");
    if (!type.is_string()) throw InvalidInput("primitive type must be a string");
    const std::string t = type.get<std::string>();
    if (t == "points") {
      PointSet ps;
      const Json& d = field(p, "data");
      if (!d.is_array()) throw InvalidInput("points data must be an array");
      for (const Json& v : d) ps.points.push_back(vec_from(v, dim, "point"));
      out.push_back(std::move(ps));
    } else if (t == "segment") {
      out.push_back(Segment{vec_from(field(p, "a"), dim, "segment"), vec_from(field(p, "b"), dim, "segment")});
    } else if (t == "polyline") {
      Polyline pl;
      const Json& d = field(p, "vertices");
      if (!d.is_array()) throw InvalidInput("polyline vertices must be an array");
      for (const Json& v : d) pl.vertices.push_back(vec_from(v, dim, "polyline"));
      out.push_back(std::move(pl));
    } else if (t == "arc") {
      out.push_back(CircularArc{vec_from(field(p, "center"), dim, "arc"), number(field(p, "r"), "arc radius"),
                                number(field(p, "theta0"), "theta0"), number(field(p, "theta1"), "theta1")});
    } else {
      throw InvalidInput("unknown primitive type '" + t + "'");
    }
  }
  return Scene(norm, std::move(out));
}

Json sample_to_json(const SingularSample& s) {
  Json clusters = Json::array();
  for (const Cluster& c : s.projection.clusters)
    clusters.push_back({{"representative", vec_json(c.representative)},
                        {"direction", vec_json(c.direction)},
                        {"covector", vec_json(c.covector.components)},
                        {"members", c.members.size()}});
  return {{"point", vec_json(s.point)},
          {"singular", true},
          {"k", s.overflow() ? Json("overflow") : Json(s.k)},
          {"rad", s.rad},
          {"conv_dim", s.conv_dim},
          {"distance", s.projection.distance},
          {"clusters", clusters}};
}

Json fan_to_json(const SectorFan& fan) {
  Json sectors = Json::array();
  for (const Sector& s : fan.sectors)
    sectors.push_back({{"index", s.index}, {"from", s.from}, {"to", s.to},
                       {"start_angle", s.start_angle}, {"gap", s.gap}});
  Json base = Json::array();
  for (const Vec& q : fan.base_points) base.push_back(vec_json(q));
  return {{"point", vec_json(fan.p)},
          {"delta0", fan.delta0},
          {"isolated", fan.isolated},
          {"directions", fan.angles},
          {"base_points", base},
          {"sectors", sectors}};
}

Json cover_to_json(const CoverReport& r) {
  Json strata = Json::array();
  for (const CoverStratum& s : r.strata) strata.push_back({{"i", s.i}, {"j", s.j}, {"samples", s.samples.size()}});
  Json arcs = Json::array();
  for (const CoverArc& a : r.arcs) {
    Json j = arc_json(a.arc);
    j["seed"] = vec_json(a.seed.point);
    j["seed_rad"] = a.seed.rad;
    j["stratum"] = {a.stratum_i, a.stratum_j};
    j["delta"] = a.delta;
    arcs.push_back(std::move(j));
  }
  Json residual = Json::array();
  for (const ResidualSample& s : r.residual)
    residual.push_back({{"point", vec_json(s.sample.point)},
                        {"k", s.sample.overflow() ? Json("overflow") : Json(s.sample.k)},
                        {"rad", s.sample.rad},
                        {"reason", s.reason}});
  return {{"h", r.h},
          {"rad_K", r.rad_k},
          {"sigma2_samples", r.sigma2_samples},
          {"covered", r.covered},
          {"iteration_cap", r.iteration_cap},
          {"cap_hit", r.cap_hit},
          {"strata", strata},
          {"arcs", arcs},
          {"residual", residual}};
}

std::string grid_csv(const OracleGrid& grid) {
  std::ostringstream out;
  out << (grid.dim == 3 ? "i,j,k,x_center,y_center,z_center,jump\n" : "i,j,x_center,y_center,jump\n");
  for (const OracleCell& c : grid.flagged) {
    for (int a = 0; a < grid.dim; ++a) out << c.index[a] << ',';
    for (int a = 0; a < grid.dim; ++a) out << fmt17(c.center[a]) << ',';
    out << fmt17(c.jump) << '\n';
  }
  return out.str();
}

std::string arc_csv(const TracedArc& arc) {
  std::ostringstream out;
  out << (arc.dim == 3 ? "t_index,x,y,z,residual,grad_mag\n" : "t_index,x,y,residual,grad_mag\n");
  for (size_t i = 0; i < arc.vertices.size(); ++i) {
    out << i << ',';
    for (int a = 0; a < arc.vertices[i].size(); ++a) out << fmt17(arc.vertices[i][a]) << ',';
    out << fmt17(arc.residual[i]) << ',' << fmt17(arc.grad_mag[i]) << '\n';
  }
  return out.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(in, line)) throw InvalidInput("empty CSV");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line)) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') throw InvalidInput("non-numeric CSV cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw InvalidInput("CSV row width differs from header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_svg(const Box& requested, const SvgLayers& layers) {
  constexpr double kSize = 1024.0;
  const double w0 = requested.hi[0] - requested.lo[0], h0 = requested.hi[1] - requested.lo[1];
  if (!(w0 > 0) || !(h0 > 0)) throw InvalidInput("render window must have positive extent");
  // Grow the shorter side so the window maps onto the square viewBox.
  const double side = std::max(w0, h0);
  const Vec mid = 0.5 * (requested.lo.head(2) + requested.hi.head(2));
  const Box window{mid.array() - side / 2, mid.array() + side / 2};
  const double scale = kSize / side;
  auto X = [&](double x) { return fmt17((x - window.lo[0]) * scale); };
  auto Y = [&](double y) { return fmt17((window.hi[1] - y) * scale); };
  auto path_of = [&](const std::vector<Vec>& pts) {
    std::string d;
    for (size_t i = 0; i < pts.size(); ++i)
      d += (i ? " L" : "M") + X(pts[i][0]) + ' ' + Y(pts[i][1]);
    return d;
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1024 1024\" width=\"1024\" "
      << "height=\"1024\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (layers.scene) {
    const double spacing = side / 2048.0;
    out << "<g id=\"scene\" stroke=\"black\" fill=\"black\" stroke-width=\"2\">\n";
    for (const Primitive& p : layers.scene->primitives()) {
      const std::vector<Vec> pts = sample_primitive(p, spacing);
      if (std::holds_alternative<PointSet>(p)) {
        for (const Vec& q : pts)
          if (window.distance(q.head(2)) <= 0.05 * side)
            out << "<circle cx=\"" << X(q[0]) << "\" cy=\"" << Y(q[1]) << "\" r=\"3\"/>\n";
      } else {
        out << "<path fill=\"none\" d=\"" << path_of(pts) << "\"/>\n";
      }
    }
    out << "</g>\n";
  }
  if (!layers.cells.empty()) {
    const double cell = layers.cell_size * scale;
    out << "<g id=\"cells\" fill=\"#d62728\" fill-opacity=\"0.6\" stroke=\"none\">\n";
    for (const Vec& c : layers.cells)
      out << "<rect x=\"" << fmt17((c[0] - window.lo[0]) * scale - cell / 2) << "\" y=\""
          << fmt17((window.hi[1] - c[1]) * scale - cell / 2) << "\" width=\"" << fmt17(cell)
          << "\" height=\"" << fmt17(cell) << "\"/>\n";
    out << "</g>\n";
  }
  if (!layers.arcs.empty()) {
    out << "<g id=\"arcs\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\">\n";
    for (const auto& arc : layers.arcs) out << "<path d=\"" << path_of(arc) << "\"/>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInput("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw InvalidInput("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InvalidInput("cannot rename into " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace medial
