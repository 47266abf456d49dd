#include <filesystem>
#include <regex>

#include "doctest.h"
#include "medial/gallery.hpp"
#include "medial/io.hpp"

using namespace medial;

namespace {

Scene round_trip(const Scene& s) { return scene_from_json(Json::parse(scene_to_json(s).dump())); }

}  // namespace

TEST_CASE("scene JSON round-trips exactly") {
  Mat m(2, 2);
  m << 2.0, 0.3, 0.3, 1.0 / 3.0;
  const std::vector<Scene> scenes = {
      branch_example().scene,
      two_point_scene(),
      two_point_scene(Norm::randers(m, vec2(0.1, -0.2))),
      triangle_scene().scene,
      polygon_scene(5).scene,
      optimality_domain(0.5).scene,
      Scene(Norm::quadratic(m), {Segment{vec2(0.1, 0.2), vec2(1.0 / 7.0, 3)}}),
      Scene(Norm::euclidean(3), {PointSet{{vec3(1, 0, 0), vec3(-1, 1e-300, 0.1)}}}),
  };
  for (const Scene& s : scenes) CHECK(round_trip(s) == s);

  // Explicit format from the interface description.
  const Json j = Json::parse(R"({"norm":{"kind":"randers","M":[[1,0],[0,1]],"b":[0.5,0]},
    "primitives":[{"type":"points","data":[[1,0],[-1,0]]},
                  {"type":"segment","a":[0,2],"b":[1,2]},
                  {"type":"polyline","vertices":[[0,3],[1,3],[1,4]]},
                  {"type":"arc","center":[5,5],"r":1,"theta0":0,"theta1":1.5}]})");
  const Scene s = scene_from_json(j);
  CHECK(s.norm().kind() == Norm::Kind::Randers);
  CHECK(s.primitives().size() == 4);
  CHECK(scene_from_json(Json::parse(R"({"norm":{"kind":"euclidean"},
    "primitives":[{"type":"points","data":[[1,0,0]]}]})")).dim() == 3);
}

TEST_CASE("scene JSON errors") {
  for (const char* bad : {
           R"({"primitives":[{"type":"points","data":[[1,0]]}]})",
           R"({"norm":{"kind":"taxicab"},"primitives":[{"type":"points","data":[[1,0]]}]})",
           R"({"norm":{"kind":"euclidean"},"primitives":[]})",
           R"({"norm":{"kind":"euclidean"},"primitives":[{"type":"blob"}]})",
           R"({"norm":{"kind":"euclidean"},"primitives":[{"type":"points","data":[[1,"x"]]}]})",
           R"({"norm":{"kind":"euclidean"},"primitives":[{"type":"points","data":[[1,0],[1,0,0]]}]})",
           R"({"norm":{"kind":"quadratic","M":[[1,2],[2,1]]},"primitives":[{"type":"points","data":[[1,0]]}]})",
           R"({"norm":{"kind":"randers","M":[[1,0],[0,1]],"b":[2,0]},"primitives":[{"type":"points","data":[[1,0]]}]})",
       }) {
    CAPTURE(bad);
    CHECK_THROWS_AS(scene_from_json(Json::parse(bad)), InvalidInput);
  }
}

TEST_CASE("CSV exports") {
  const BranchExample br = branch_example();
  const OracleGrid grid = oracle_scan(br.scene, {vec2(-0.25, -0.25), vec2(0.25, 0.25)}, 1.0 / 64);
  const std::string csv = grid_csv(grid);
  const CsvTable t = parse_csv(csv);
  CHECK(t.is_grid());
  CHECK(t.header == std::vector<std::string>{"i", "j", "x_center", "y_center", "jump"});
  REQUIRE(t.rows.size() == grid.flagged.size());
  for (size_t r = 0; r < t.rows.size(); ++r) {
    CHECK(t.rows[r][2] == grid.flagged[r].center[0]);  // %.17g is exact
    CHECK(t.rows[r][4] == grid.flagged[r].jump);
  }

  TracedArc arc;
  arc.vertices = {vec2(0.1, 1.0 / 3.0), vec2(0.2, 0.4)};
  arc.residual = {1e-12, 0};
  arc.grad_mag = {1.5, 2.0};
  const CsvTable a = parse_csv(arc_csv(arc));
  CHECK(a.is_arc());
  CHECK(a.header.size() == 5);
  CHECK(a.rows[0][2] == 1.0 / 3.0);
  CHECK(fmt17(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(parse_csv("i,j\n1,x\n"), InvalidInput);
}

TEST_CASE("SVG rendering") {
  SvgLayers layers;
  const Scene two = two_point_scene();
  layers.scene = &two;
  layers.cells = {vec2(0, 0), vec2(0, 0.1)};
  layers.cell_size = 0.1;
  layers.arcs = {{vec2(0, -1), vec2(0, 1)}, {vec2(-1, 0), vec2(1, 0.5), vec2(0.5, 0.5)}};
  const std::string svg = render_svg({vec2(-2, -2), vec2(2, 2)}, layers);
  CHECK(svg.find("viewBox=\"0 0 1024 1024\"") != std::string::npos);
  const auto arcs_at = svg.find("<g id=\"arcs\"");
  REQUIRE(arcs_at != std::string::npos);
  const std::string arcs = svg.substr(arcs_at);
  const std::regex path("<path ");
  CHECK(std::distance(std::sregex_iterator(arcs.begin(), arcs.end(), path), std::sregex_iterator()) == 2);
  CHECK(svg.rfind("</svg>") != std::string::npos);
  CHECK_THROWS_AS(render_svg({vec2(0, 0), vec2(0, 1)}, layers), InvalidInput);
}

TEST_CASE("atomic writes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "medial_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  write_atomic(path, "first");
  write_atomic(path, "second");
  CHECK(read_file(path) == "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  fs::remove_all(dir);
  CHECK_THROWS_AS(write_atomic("/nonexistent-dir/x.txt", "x"), InvalidInput);
  CHECK_THROWS_AS(read_file("/nonexistent-dir/x.txt"), InvalidInput);
}
