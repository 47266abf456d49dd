// medial_atlas: command-line front end for the singular-set library.
// Exit codes: 0 success, 2 bad arguments or input, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "medial/gallery.hpp"
#include "medial/io.hpp"
#include "medial/propagate.hpp"
#include "medial/sectors.hpp"

using namespace medial;

namespace {

Vec point_arg(const std::vector<double>& v, const char* what) {
  if (v.size() != 2 && v.size() != 3)
    throw InvalidInput(std::string(what) + " needs 2 or 3 comma-separated numbers");
  Vec p(v.size());
  for (size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

Box window_arg(const std::vector<double>& v, int dim) {
  if (static_cast<int>(v.size()) != 2 * dim)
    throw InvalidInput("--window needs " + std::to_string(2 * dim) + " numbers for a " +
                       std::to_string(dim) + "D scene");
  Box b{Vec(dim), Vec(dim)};
  for (int a = 0; a < dim; ++a) {
    b.lo[a] = v[a];
    b.hi[a] = v[dim + a];
    if (!(b.lo[a] < b.hi[a])) throw InvalidInput("--window must have lo < hi on every axis");
  }
  return b;
}

Scene load_scene(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput("scene JSON does not parse: " + std::string(e.what()));
  }
  if (j.contains("convex_function"))
    throw InvalidInput(path + " describes a convex function, not a scene");
  return scene_from_json(j);
}

std::string oracle_path_for(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".json") p.replace_extension();
  p += ".oracle.json";
  return p.string();
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

struct GalleryArgs {
  std::string name, out, oracle;
  int k = 5;
  int k_max = 64;
  double epsilon = 0.5;
  int stages = 4;
  double sigma = 0.5;
  int depth = 8;
  int j_max = 24;
};

void run_gallery(const GalleryArgs& g) {
  Json scene, oracle;
  oracle["name"] = g.name;
  if (g.name == "branch") {
    const BranchExample br = branch_example(g.k_max);
    scene = scene_to_json(br.scene);
    Json lines = Json::array();
    for (int k = 1; k <= br.k_max; ++k) lines.push_back(BranchExample::a(k));
    oracle["k_max"] = br.k_max;
    oracle["description"] = "singular set = Y (x = 0) union X_k (y = a_k, x != 0)";
    oracle["x_lines"] = lines;
    oracle["truncation_error"] = br.truncation_error();
  } else if (g.name == "two-point") {
    scene = scene_to_json(two_point_scene());
    oracle["description"] = "singular set = perpendicular bisector x = 0";
  } else if (g.name == "triangle") {
    const TriangleExample t = triangle_scene();
    scene = scene_to_json(t.scene);
    Json verts = Json::array(), rays = Json::array();
    for (const Vec& v : t.vertices) verts.push_back(vec_json(v));
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) rays.push_back({{"pair", {i, j}}, {"direction", vec_json(t.bisector_direction(i, j))}});
    oracle["description"] = "three bisector rays from the circumcenter";
    oracle["vertices"] = verts;
    oracle["circumcenter"] = vec_json(t.circumcenter);
    oracle["rays"] = rays;
  } else if (g.name == "polygon") {
    const PolygonExample p = polygon_scene(g.k);
    scene = scene_to_json(p.scene);
    Json verts = Json::array();
    for (const Vec& v : p.vertices) verts.push_back(vec_json(v));
    oracle["description"] = "spokes from the center to the vertices; the center has multiplicity k+1";
    oracle["k"] = g.k;
    oracle["vertices"] = verts;
  } else if (g.name == "optimality") {
    const OptimalityDomain d = optimality_domain(g.epsilon, g.stages);
    scene = scene_to_json(d.scene);
    Json removed = Json::array(), bumps = Json::array();
    for (auto [l, r] : d.removed) removed.push_back({l, r});
    for (const Bump& b : d.bumps)
      bumps.push_back({{"x0", b.x0}, {"a", b.a}, {"delta", b.delta}, {"top", b.top}});
    oracle["description"] = "singular set = graph of f(x) = sum over bumps of +-(x - x0 -+ a)^2/8 on [0, 1]";
    oracle["epsilon"] = d.epsilon;
    oracle["stages"] = d.stages;
    oracle["removed"] = removed;
    oracle["bumps"] = bumps;
  } else if (g.name == "cantor") {
    const ConvexFn fn = cantor_convex(g.sigma, g.depth);
    scene = {{"convex_function", {{"name", "cantor"}, {"sigma", g.sigma}, {"depth", g.depth}}}};
    Json iv = Json::array();
    for (auto [l, r] : cantor_intervals(g.sigma, g.depth)) iv.push_back({l, r});
    oracle["description"] = fn.description;
    oracle["removed_intervals"] = iv;
    oracle["truncation_error"] = fn.truncation_error;
  } else if (g.name == "zigzag") {
    const ConvexFn fn = zigzag_convex(g.j_max);
    scene = {{"convex_function", {{"name", "zigzag"}, {"j_max", g.j_max}}}};
    Json segs = Json::array();
    for (const Segment& s : zigzag_segments(g.j_max)) segs.push_back({vec_json(s.a), vec_json(s.b)});
    oracle["description"] = fn.description;
    oracle["segments"] = segs;
    oracle["truncation_error"] = fn.truncation_error;
  } else {
    throw InvalidInput("unknown gallery '" + g.name +
                       "' (branch | optimality | cantor | zigzag | polygon | two-point | triangle)");
  }
  write_atomic(g.out, scene.dump(2) + "\n");
  write_atomic(g.oracle.empty() ? oracle_path_for(g.out) : g.oracle, oracle.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular sets of distance functions under Minkowski norms"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  GalleryArgs gal;
  auto* gallery = app.add_subcommand("gallery", "Write a gallery scene and its oracle as JSON");
  gallery->add_option("name", gal.name, "branch | optimality | cantor | zigzag | polygon | two-point | triangle")
      ->required();
  gallery->add_option("--out", gal.out, "Scene JSON path")->required();
  gallery->add_option("--oracle", gal.oracle, "Oracle JSON path (default <out>.oracle.json)");
  gallery->add_option("--k", gal.k, "polygon: (k+1)-gon");
  gallery->add_option("--k-max", gal.k_max, "branch: number of point pairs");
  gallery->add_option("--epsilon", gal.epsilon, "optimality: removed length parameter");
  gallery->add_option("--stages", gal.stages, "optimality: Cantor stages");
  gallery->add_option("--sigma", gal.sigma, "cantor: ratio parameter");
  gallery->add_option("--depth", gal.depth, "cantor: construction depth");
  gallery->add_option("--j-max", gal.j_max, "zigzag: number of levels");

  std::string scene_path, out_path;
  std::vector<double> window, point;
  double h = 1.0 / 256, c_jump = 8.0;
  auto* scan = app.add_subcommand("scan", "Grid scan of the singular set to CSV");
  scan->add_option("--scene", scene_path)->required();
  scan->add_option("--window", window, "x0,y0,x1,y1 (or 6 numbers in 3D)")->delimiter(',')->required();
  scan->add_option("--h", h, "Grid step");
  scan->add_option("--c-jump", c_jump, "Flag threshold in units of h");
  scan->add_option("--out", out_path)->required();

  auto* cls = app.add_subcommand("classify", "Projection clusters at one point, as JSON on stdout");
  cls->add_option("--scene", scene_path)->required();
  cls->add_option("--point", point)->delimiter(',')->required();

  double trace_h = 0.0, radius = 0.0, tol = 1e-10;
  auto* trace = app.add_subcommand("trace", "Propagate the singular arc through a two-cluster point");
  trace->add_option("--scene", scene_path)->required();
  trace->add_option("--seed-point", point)->delimiter(',')->required();
  trace->add_option("--h", trace_h, "Step (default delta/200)");
  trace->add_option("--radius", radius, "Ball radius (default delta)");
  trace->add_option("--tol", tol, "Corrector tolerance");
  trace->add_option("--out", out_path)->required();

  std::string arcs_prefix;
  auto* sec = app.add_subcommand("sectors", "Sector fan at a singular point, as JSON");
  sec->add_option("--scene", scene_path)->required();
  sec->add_option("--point", point)->delimiter(',')->required();
  sec->add_option("--out", out_path, "JSON path (default stdout)");
  sec->add_option("--arcs", arcs_prefix, "Write one CSV per sector arc to <prefix><i>.csv");

  auto* cov = app.add_subcommand("cover", "Stratified greedy cover of the sampled singular set");
  cov->add_option("--scene", scene_path)->required();
  cov->add_option("--window", window)->delimiter(',')->required();
  cov->add_option("--h", h, "Sampling grid step");
  cov->add_option("--c-jump", c_jump, "Flag threshold in units of h");
  cov->add_option("--out", out_path)->required();

  std::vector<std::string> inputs;
  std::string svg_path;
  double cell = 0.0;
  auto* render = app.add_subcommand("render", "SVG figure from grid and arc CSV files");
  render->add_option("--in", inputs, "grid.csv or arc.csv (repeatable)")->required();
  render->add_option("--svg", svg_path)->required();
  render->add_option("--scene", scene_path, "Draw the scene primitives too");
  render->add_option("--window", window, "x0,y0,x1,y1 (default: data bounds)")->delimiter(',');
  render->add_option("--h", cell, "Cell size for grid inputs (default: inferred)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gallery) {
      run_gallery(gal);
    } else if (*scan) {
      const Scene scene = load_scene(scene_path);
      const OracleGrid grid = oracle_scan(scene, window_arg(window, scene.dim()), h, {c_jump});
      write_atomic(out_path, grid_csv(grid));
    } else if (*cls) {
      const Scene scene = load_scene(scene_path);
      const Vec p = point_arg(point, "--point");
      if (p.size() != scene.dim()) throw InvalidInput("--point dimension differs from the scene");
      auto s = classify(scene, p);
      const Json j = s ? sample_to_json(*s) : Json{{"point", vec_json(p)}, {"singular", false}};
      std::cout << j.dump(2) << "\n";
    } else if (*trace) {
      const Scene scene = load_scene(scene_path);
      const Vec p = point_arg(point, "--seed-point");
      if (scene.dim() != 2 || p.size() != 2) throw InvalidInput("trace works on planar scenes");
      auto s = classify(scene, p);
      if (!s || s->k != 2) throw InvalidInput("--seed-point must have exactly two projection clusters");
      SplitPair pair = split(scene, *s);
      pair.delta = estimate_delta(scene, pair);
      TraceOptions opt;
      opt.h = trace_h;
      opt.radius = radius;
      opt.tol = tol;
      write_atomic(out_path, arc_csv(trace_arc_2d(scene, pair, opt)));
    } else if (*sec) {
      const Scene scene = load_scene(scene_path);
      const Vec p = point_arg(point, "--point");
      if (scene.dim() != 2 || p.size() != 2) throw InvalidInput("sectors work on planar scenes");
      const SectorFan fan = sectors_at(scene, p);
      const std::string text = fan_to_json(fan).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_atomic(out_path, text);
      }
      if (!arcs_prefix.empty() && fan.sectors.size() >= 2)
        for (const Sector& s : fan.sectors)
          write_atomic(arcs_prefix + std::to_string(s.index) + ".csv", arc_csv(sector_arc(scene, fan, s).arc));
    } else if (*cov) {
      const Scene scene = load_scene(scene_path);
      CoverOptions opt;
      opt.h = h;
      opt.oracle.c_jump = c_jump;
      const CoverReport report = cover(scene, window_arg(window, scene.dim()), opt);
      write_atomic(out_path, cover_to_json(report).dump(2) + "\n");
    } else if (*render) {
      SvgLayers layers;
      std::optional<Scene> scene;
      if (!scene_path.empty()) {
        scene = load_scene(scene_path);
        layers.scene = &*scene;
      }
      Vec lo = vec2(1e300, 1e300), hi = vec2(-1e300, -1e300);
      double inferred = 1e300;
      for (const std::string& in : inputs) {
        const CsvTable t = parse_csv(read_file(in));
        if (t.is_grid()) {
          const int dim = t.header.size() == 7 ? 3 : 2;
          if (dim != 2) throw InvalidInput("render draws planar grids only");
          for (const auto& r : t.rows) {
            const Vec c = vec2(r[2], r[3]);
            for (const Vec& o : layers.cells)
              if (const double d = (o - c).cwiseAbs().maxCoeff(); d > 1e-12) inferred = std::min(inferred, d);
            layers.cells.push_back(c);
          }
        } else if (t.is_arc()) {
          if (t.header.size() != 5) throw InvalidInput("render draws planar arcs only");
          std::vector<Vec> pts;
          for (const auto& r : t.rows) pts.push_back(vec2(r[1], r[2]));
          layers.arcs.push_back(std::move(pts));
        } else {
          throw InvalidInput(in + " is neither a grid CSV nor an arc CSV");
        }
      }
      for (const Vec& c : layers.cells) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
      }
      for (const auto& a : layers.arcs)
        for (const Vec& v : a) {
          lo = lo.cwiseMin(v);
          hi = hi.cwiseMax(v);
        }
      Box box;
      if (!window.empty()) {
        box = window_arg(window, 2);
      } else {
        if (!(lo[0] <= hi[0])) throw InvalidInput("nothing to render");
        const double pad = 0.05 * std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-3});
        box = {lo.array() - pad, hi.array() + pad};
      }
      layers.cell_size = cell > 0 ? cell : (inferred < 1e300 ? inferred : 0.005 * (box.hi - box.lo).maxCoeff());
      write_atomic(svg_path, render_svg(box, layers));
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
