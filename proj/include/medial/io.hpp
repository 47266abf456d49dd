#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "medial/propagate.hpp"
#include "medial/sectors.hpp"
#include "medial/singular.hpp"

namespace medial {

using Json = nlohmann::ordered_json;

Json norm_to_json(const Norm& norm);
/// `dim` is used when the JSON does not carry one (e.g. {"kind":"euclidean"}).
Norm norm_from_json(const Json& j, int dim);

Json scene_to_json(const Scene& scene);
/// Throws InvalidInput on malformed or inconsistent input.
Scene scene_from_json(const Json& j);

Json sample_to_json(const SingularSample& sample);
Json fan_to_json(const SectorFan& fan);
Json cover_to_json(const CoverReport& report);

/// CSV rows (i, j[, k], x_center, y_center[, z_center], jump).
std::string grid_csv(const OracleGrid& grid);
/// CSV rows (t_index, x, y[, z], residual, grad_mag).
std::string arc_csv(const TracedArc& arc);

/// Parsed back from the CSV formats above, for rendering.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  bool is_grid() const { return !header.empty() && header[0] == "i"; }
  bool is_arc() const { return !header.empty() && header[0] == "t_index"; }
};
CsvTable parse_csv(const std::string& text);

struct SvgLayers {
  const Scene* scene = nullptr;
  /// Cell centers and their common side length.
  std::vector<Vec> cells;
  double cell_size = 0.0;
  std::vector<std::vector<Vec>> arcs;
};

/// Window mapped to a 1024-unit viewBox (y up); scene primitives, singular
/// cells and arcs each in their own group, one path per arc.
std::string render_svg(const Box& window, const SvgLayers& layers);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// %.17g formatting.
std::string fmt17(double x);

}  // namespace medial
