#pragma once

#include "dlotrace/core.hpp"
#include "dlotrace/geometry.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace dlo {

/// One cable: a densely sampled path (consecutive spacing <= 2 px) plus the
/// control points it was built from, when the construction had any.
struct CablePath {
  int id = 0;
  double thickness = 6.0;
  Polyline points;
  std::vector<Vec2> control_points;
};

/// (cable, vertex index) reference to one strand pass through a crossing.
struct StrandRef {
  int cable = 0;
  int index = 0;
};

struct CrossingGT {
  Vec2 position = Vec2::Zero();
  StrandRef strand_a;
  StrandRef strand_b;
  int over = 0;  // 0 -> strand_a on top, 1 -> strand_b
};

/// One entry of a template's canonical crossing code.
struct CodeEntry {
  int id = 0;  // crossing number, assigned by first-encounter order, 1-based
  Sign sign = Sign::over;
};

struct Scene {
  int width = 512;
  int height = 512;
  std::vector<CablePath> cables;
  std::vector<CrossingGT> crossings;
  std::vector<std::array<Vec2, 2>> endpoints;  // per cable: {trace start, far end}

  // Template metadata; empty/defaulted for random scenes.
  std::string template_name;
  std::vector<CodeEntry> canonical_code;
  bool knotted = false;
  int first_knot_crossing = -1;  // index into `crossings` of the expected first
                                 // knot undercrossing, -1 if none
};

void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

}  // namespace dlo
