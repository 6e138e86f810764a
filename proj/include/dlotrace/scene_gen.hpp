#pragma once

#include "dlotrace/image.hpp"
#include "dlotrace/scene.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlo {

/// Thrown when rejection sampling cannot satisfy the requested constraints
/// (over-constrained parameters or a degenerate canvas).
class SampleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a scene violates the semi-planar guarantee: three strand
/// passes meet within the crossing merge radius.
class SceneRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SampleMethod { exclusion_radius, near_parallel, spatial_constraint };

SampleMethod sample_method_from_string(const std::string& s);
std::string to_string(SampleMethod m);

struct SampleParams {
  int spans = 6;                    // cubic spans in the chain
  double thickness = 6.0;
  double margin = 28.0;             // control-point margin from the canvas edge
  double exclusion_radius = 30.0;   // method 1: min distance between sampled control points
  double parallel_offset = 8.0;     // method 2: lateral offset of the duplicated subpath
  double parallel_fraction = 0.35;  // method 2: arc-length fraction that gets duplicated
  // method 3: control points of the middle spans confined to this region
  // (defaults to a centered box of 0.35 * min(w, h) when unset)
  std::optional<Eigen::AlignedBox2d> constraint_region;
  int constrained_spans = 3;
  int max_rejections = 20000;
};

/// Chained cubic Bezier cable, C1-joined: each span's first inner control
/// point mirrors the previous span's, so only the remaining points are drawn
/// from the RNG. The sampled (non-derived) control points honor the method's
/// constraints; `CablePath::control_points` stores exactly those.
CablePath sample_cable(std::uint64_t seed, SampleMethod method, int width, int height,
                       const SampleParams& params = {});

struct RenderConfig {
  double centerline_intensity = 250.0;
  double edge_intensity = 200.0;     // stroke intensity floor at the stroke border
  double thickness_jitter = 0.2;     // +-20% of nominal, drawn per cable
  bool seam = true;                  // dark seam along the over strand at crossings
  double seam_darken = 40.0;
  double seam_width = 2.0;
  double background = 0.0;
};

/// Rasterizes the scene: white strokes on black, per-cable thickness jitter,
/// and at every crossing the over strand re-drawn last so its stroke runs
/// unbroken. Deterministic per seed.
ImageU8 render_scene(const Scene& scene, std::uint64_t seed, const RenderConfig& cfg = {});

struct AugmentConfig {
  bool enabled = true;
  double noise_sigma = 6.0;       // per-pixel Gaussian
  double brightness_sigma = 5.0;  // one global shift per image
  bool sharpen = true;            // 3x3 unsharp mask
};

ImageU8 augment_image(const ImageU8& img, std::uint64_t seed, const AugmentConfig& cfg = {});

inline constexpr double kCrossingMergeRadius = 2.0;

/// All crossings of the scene's cable paths: an all-pairs segment
/// intersection sweep (including self-pairs), deduplicated within the 2-px
/// merge radius. The z-order is read back from the scene's stored
/// assignments by position. Throws SceneRejected on a three-strand
/// coincidence.
std::vector<CrossingGT> ground_truth_crossings(const Scene& scene);

/// Crossing positions and strand references only (no z). Used while
/// assembling scenes, before z-orders exist.
std::vector<CrossingGT> find_crossings(const std::vector<CablePath>& cables);

/// Random scene: `n_cables` cables sampled with `method`, crossings computed,
/// z-orders drawn per crossing. Scenes with three-strand coincidences are
/// re-drawn from derived seeds.
Scene make_random_scene(std::uint64_t seed, SampleMethod method, int n_cables, int width,
                        int height, const SampleParams& params = {});

struct Pose2 {
  double rotation = 0.0;  // radians, counterclockwise in (x, y)
  Vec2 translation = Vec2::Zero();  // applied after centering on the canvas
  bool mirror = false;    // reflect x before rotating
};

/// Known template names: straight, s_curve, fake_loop, fake_double_loop,
/// overhand, trefoil_closed_analogue, figure_eight, linked_overhand.
std::vector<std::string> template_names();
bool template_is_knotted(const std::string& name);

/// Builds a single-cable scene whose ground-truth crossing sequence equals
/// the template's canonical code when traced from endpoint[0]. `scale` is
/// pixels per template unit. Throws std::invalid_argument for unknown names
/// and SceneRejected when the scale is too small for the stroke thickness.
Scene knot_template(const std::string& name, double scale, const Pose2& pose = {},
                    int width = 512, int height = 512, double thickness = 6.0);

/// Re-poses the single cable of a template scene and merges several such
/// parts into one multi-cable scene. Intra-part crossings keep their z-order;
/// inter-part crossings get z drawn from the seed.
Scene compose_scene(const std::vector<Scene>& parts, int width, int height, std::uint64_t seed);

}  // namespace dlo
