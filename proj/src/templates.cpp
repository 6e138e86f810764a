// Knot templates: hand-authored cable geometries whose ground-truth crossing
// sequences are frozen here and re-validated on every construction.

#include "dlotrace/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dlo {

namespace {

struct TemplateDef {
  Polyline path;                   // unit-scale geometry
  std::vector<int> id_pattern;     // crossing id per encounter, 1-based, first-encounter order
  std::vector<Sign> signs;         // canonical sign per encounter
  bool knotted = false;
  int first_knot_encounter = -1;   // encounter expected to start the first knot span
};

// Cubic Hermite blend between two points with prescribed end tangents.
void hermite(const Vec2& p0, const Vec2& m0, const Vec2& p1, const Vec2& m1, double spacing,
             Polyline& out) {
  const double chord = (p1 - p0).norm();
  const int n = std::max(4, static_cast<int>(std::ceil(2.0 * chord / spacing)));
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    out.push_back(h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1);
  }
}

// Trefoil projection: three self-crossings, lobes at t = pi/3, pi, 5pi/3.
Vec2 trefoil_point(double t) {
  return Vec2(std::sin(t) + 2.0 * std::sin(2.0 * t), std::cos(t) - 2.0 * std::cos(2.0 * t)) / 3.0;
}
Vec2 trefoil_tangent(double t) {
  return Vec2(std::cos(t) + 4.0 * std::cos(2.0 * t), -std::sin(t) + 4.0 * std::sin(2.0 * t))
      .normalized();
}

/// Open trefoil: parameter runs [pi + gap_half, 3*pi - gap_half], so the cut
/// sits at the bottom lobe.
Polyline open_trefoil(double gap_half, double spacing) {
  const double t0 = kPi + gap_half;
  const double t1 = 3.0 * kPi - gap_half;
  const int n = std::max(64, static_cast<int>(std::ceil((t1 - t0) * (5.0 / 3.0) / spacing)));
  Polyline out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out.push_back(trefoil_point(t0 + (t1 - t0) * i / n));
  return out;
}

/// Half-gap parameter that puts the two cut endpoints `gap` apart.
double trefoil_gap_half(double gap) {
  double lo = 0.02, hi = 0.6;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double d = (trefoil_point(kPi + mid) - trefoil_point(3.0 * kPi - mid)).norm();
    (d < gap ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Sign> alternating_signs(int encounters) {
  std::vector<Sign> s(static_cast<std::size_t>(encounters));
  for (int i = 0; i < encounters; ++i)
    s[static_cast<std::size_t>(i)] = (i % 2 == 0) ? Sign::under : Sign::over;
  return s;
}

TemplateDef def_straight(double spacing) {
  TemplateDef def;
  const int n = static_cast<int>(std::ceil(2.0 / spacing));
  for (int i = 0; i <= n; ++i) def.path.emplace_back(-1.0 + 2.0 * i / n, 0.0);
  return def;
}

TemplateDef def_s_curve(double spacing) {
  TemplateDef def;
  const int n = static_cast<int>(std::ceil(5.0 / spacing));
  for (int i = 0; i <= n; ++i) {
    const double x = -1.0 + 2.0 * i / n;
    def.path.emplace_back(x, 0.35 * std::sin(kPi * x));
  }
  return def;
}

// One trivial loop: straight lead-in, an outward spiral crossing the lead-in
// once, then a tangential exit. Code O1 U1.
TemplateDef def_fake_loop(double spacing) {
  TemplateDef def;
  Polyline& p = def.path;
  const Vec2 center(0.30, -0.20);
  const int lead = static_cast<int>(std::ceil(1.35 / spacing));
  for (int i = 0; i < lead; ++i) p.emplace_back(-1.05 + 1.35 * i / lead, 0.10);
  const int n = static_cast<int>(std::ceil(5.5 / spacing));
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    const double theta = deg2rad(90.0 - 460.0 * s);
    const double r = 0.30 + 0.12 * s;
    p.push_back(center + r * Vec2(std::cos(theta), std::sin(theta)));
  }
  // Tangential exit.
  const Vec2 tail_dir = (p.back() - p[p.size() - 2]).normalized();
  const Vec2 tail_from = p.back();
  const int tn = static_cast<int>(std::ceil(0.45 / spacing));
  for (int i = 1; i <= tn; ++i) p.push_back(tail_from + 0.45 * tail_dir * i / tn);
  def.id_pattern = {1, 1};
  def.signs = {Sign::over, Sign::under};
  return def;
}

// Two crossings of one strand pair, visited 1-2-1-2 with the first pass
// under both times: the classic pair of trivial loops that cancels as a unit
// but looks knot-like raw. Code U1 U2 O1 O2.
TemplateDef def_fake_double_loop(double spacing) {
  TemplateDef def;
  const std::vector<Vec2> w = {
      {-1.05, 0.0}, {-0.5, 0.0},   {0.0, 0.0},    {0.5, 0.0},    {1.0, 0.0},
      {1.08, 0.3},  {0.85, 0.62},  {0.3, 0.82},   {-0.35, 0.78}, {-0.85, 0.55},
      {-0.6, 0.28}, {-0.42, 0.09}, {-0.28, -0.09}, {-0.1, -0.26}, {0.1, -0.26},
      {0.28, -0.09}, {0.42, 0.09}, {0.5, 0.28},   {0.42, 0.42},  {0.2, 0.47},
      {0.0, 0.42}};
  def.path = catmull_rom(w, spacing);
  def.id_pattern = {1, 2, 1, 2};
  def.signs = {Sign::under, Sign::under, Sign::over, Sign::over};
  return def;
}

TemplateDef def_overhand(double spacing) {
  TemplateDef def;
  const double gap_half = 0.35;
  Polyline body = open_trefoil(gap_half, spacing);
  // Tails leave the cut endpoints along the outward radial direction.
  const Vec2 start = body.front();
  const Vec2 end = body.back();
  const Vec2 start_tan = trefoil_tangent(kPi + gap_half);
  const Vec2 end_tan = trefoil_tangent(3.0 * kPi - gap_half);
  const Vec2 start_out = start.normalized();
  const Vec2 end_out = end.normalized();
  Polyline head;
  head.push_back(start + 0.45 * start_out);
  hermite(head.front(), -0.45 * start_out, start, start_tan * 0.45, spacing, head);
  Polyline out = head;
  out.insert(out.end(), body.begin() + 1, body.end());
  hermite(end, end_tan * 0.45, end + 0.45 * end_out, 0.45 * end_out, spacing, out);
  def.path = std::move(out);
  def.id_pattern = {1, 2, 3, 1, 2, 3};
  def.signs = alternating_signs(6);  // U1 O2 U3 O1 U2 O3
  def.knotted = true;
  def.first_knot_encounter = 0;
  return def;
}

TemplateDef def_trefoil_closed(double spacing, double gap_units) {
  TemplateDef def;
  def.path = open_trefoil(trefoil_gap_half(gap_units), spacing);
  def.id_pattern = {1, 2, 3, 1, 2, 3};
  def.signs = alternating_signs(6);
  def.knotted = true;
  def.first_knot_encounter = 0;
  return def;
}

TemplateDef def_linked_overhand(double spacing) {
  TemplateDef def;
  const double sub = 0.45;
  const double gap_half = 0.35;
  const auto rot = [](const Vec2& v, double ang) {
    return Vec2(v.x() * std::cos(ang) - v.y() * std::sin(ang),
                v.x() * std::sin(ang) + v.y() * std::cos(ang));
  };
  // Knot 1 cut faces +x, knot 2 cut faces -x; bridge runs through the gap.
  const Vec2 c1(-0.62, 0.0), c2(0.62, 0.0);
  const auto xf1 = [&](const Vec2& p) { return c1 + sub * rot(p, kPi / 2.0); };
  const auto xf2 = [&](const Vec2& p) { return c2 + sub * rot(p, -kPi / 2.0); };
  Polyline k1 = open_trefoil(gap_half, spacing / sub);
  Polyline k2 = open_trefoil(gap_half, spacing / sub);
  for (Vec2& p : k1) p = xf1(p);
  for (Vec2& p : k2) p = xf2(p);
  const Vec2 k1_end_tan = rot(trefoil_tangent(3.0 * kPi - gap_half), kPi / 2.0);
  const Vec2 k2_start_tan = rot(trefoil_tangent(kPi + gap_half), -kPi / 2.0);
  Polyline out = k1;
  const double bridge_len = (k2.front() - k1.back()).norm();
  hermite(k1.back(), k1_end_tan * bridge_len, k2.front(), k2_start_tan * bridge_len, spacing, out);
  out.insert(out.end(), k2.begin() + 1, k2.end());
  def.path = std::move(out);
  def.id_pattern = {1, 2, 3, 1, 2, 3, 4, 5, 6, 4, 5, 6};
  def.signs = alternating_signs(12);
  def.knotted = true;
  def.first_knot_encounter = 0;
  return def;
}

// Figure-eight knot from the standard embedding
// ((2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t, sin 4t); the projection is the
// diagram, the z component fixes the over strand at every crossing. The
// resulting code is frozen in the id/sign tables below and re-validated on
// construction.
Vec2 fig8_point(double t) {
  const double r = 2.0 + std::cos(2.0 * t);
  return Vec2(r * std::cos(3.0 * t), r * std::sin(3.0 * t)) / 3.0;
}

TemplateDef def_figure_eight(double spacing, const std::vector<int>& pattern,
                             const std::vector<Sign>& signs, int first_knot) {
  TemplateDef def;
  const double gap_half = 0.10;
  const double t0 = gap_half;
  const double t1 = 2.0 * kPi - gap_half;
  const int n = std::max(128, static_cast<int>(std::ceil((t1 - t0) * 3.0 / spacing)));
  for (int i = 0; i <= n; ++i) def.path.push_back(fig8_point(t0 + (t1 - t0) * i / n));
  def.id_pattern = pattern;
  def.signs = signs;
  def.knotted = true;
  def.first_knot_encounter = first_knot;
  return def;
}

TemplateDef make_def(const std::string& name, double spacing) {
  if (name == "straight") return def_straight(spacing);
  if (name == "s_curve") return def_s_curve(spacing);
  if (name == "fake_loop") return def_fake_loop(spacing);
  if (name == "fake_double_loop") return def_fake_double_loop(spacing);
  if (name == "overhand") return def_overhand(spacing);
  if (name == "trefoil_closed_analogue") return def_trefoil_closed(spacing, 0.30);
  if (name == "linked_overhand") return def_linked_overhand(spacing);
  if (name == "figure_eight") {
    // Frozen from the embedding above: 8 encounters over 4 crossings.
    const std::vector<int> pattern = {1, 2, 3, 4, 1, 2, 3, 4};
    const std::vector<Sign> signs = {Sign::under, Sign::over,  Sign::under, Sign::over,
                                     Sign::over,  Sign::under, Sign::over,  Sign::under};
    return def_figure_eight(spacing, pattern, signs, 0);
  }
  throw std::invalid_argument("unknown template: " + name);
}

struct Encounter {
  int crossing;  // index into the found-crossings list
  int index;     // trace vertex index of the pass
  bool first;    // first or second visit of the crossing
};

}  // namespace

std::vector<std::string> template_names() {
  return {"straight",  "s_curve",       "fake_loop",               "fake_double_loop",
          "overhand",  "figure_eight",  "trefoil_closed_analogue", "linked_overhand"};
}

bool template_is_knotted(const std::string& name) {
  return name == "overhand" || name == "figure_eight" ||
         name == "trefoil_closed_analogue" || name == "linked_overhand";
}

Scene knot_template(const std::string& name, double scale, const Pose2& pose, int width,
                    int height, double thickness) {
  if (scale <= 0.0) throw std::invalid_argument("scale must be positive");
  TemplateDef def = make_def(name, 1.5 / scale);

  const Vec2 canvas_center(width / 2.0, height / 2.0);
  const double ca = std::cos(pose.rotation);
  const double sa = std::sin(pose.rotation);
  for (Vec2& p : def.path) {
    Vec2 q = p;
    if (pose.mirror) q.x() = -q.x();
    q *= scale;
    p = canvas_center + pose.translation + Vec2(ca * q.x() - sa * q.y(), sa * q.x() + ca * q.y());
  }
  for (const Vec2& p : def.path) {
    if (p.x() < 1.0 || p.y() < 1.0 || p.x() > width - 2.0 || p.y() > height - 2.0)
      throw std::invalid_argument("template does not fit the canvas at this scale/pose");
  }

  Scene scene;
  scene.width = width;
  scene.height = height;
  CablePath cable;
  cable.id = 0;
  cable.thickness = thickness;
  cable.points = std::move(def.path);
  scene.cables.push_back(std::move(cable));
  scene.endpoints.push_back({scene.cables[0].points.front(), scene.cables[0].points.back()});
  scene.template_name = name;
  scene.knotted = def.knotted;

  std::vector<CrossingGT> found;
  try {
    found = find_crossings(scene.cables);
  } catch (const SceneRejected&) {
    throw SceneRejected("template '" + name + "': scale too small, crossings merge");
  }

  // Encounters in trace order; crossing ids by first-encounter rank.
  std::vector<Encounter> enc;
  for (std::size_t i = 0; i < found.size(); ++i) {
    enc.push_back({static_cast<int>(i), found[i].strand_a.index, true});
    enc.push_back({static_cast<int>(i), found[i].strand_b.index, false});
  }
  std::sort(enc.begin(), enc.end(),
            [](const Encounter& a, const Encounter& b) { return a.index < b.index; });
  std::vector<int> id_of_crossing(found.size(), 0);
  {
    int next_id = 1;
    for (const Encounter& e : enc)
      if (e.first) id_of_crossing[static_cast<std::size_t>(e.crossing)] = next_id++;
  }
  std::vector<int> observed;
  observed.reserve(enc.size());
  for (const Encounter& e : enc) observed.push_back(id_of_crossing[static_cast<std::size_t>(e.crossing)]);
  if (observed != def.id_pattern)
    throw SceneRejected("template '" + name + "': crossing pattern failed validation");

  // Minimum crossing separation keeps distinct crossings visually distinct.
  const double min_sep = std::max(3.0 * thickness, 2.0 * kCrossingMergeRadius + 2.0);
  for (std::size_t i = 0; i < found.size(); ++i)
    for (std::size_t j = i + 1; j < found.size(); ++j)
      if ((found[i].position - found[j].position).norm() < min_sep)
        throw SceneRejected("template '" + name + "': scale too small for thickness");

  // Assign z so the traced signs equal the canonical code.
  for (std::size_t k = 0; k < enc.size(); ++k) {
    const Encounter& e = enc[k];
    if (!e.first) continue;
    const Sign s = def.signs[k];
    found[static_cast<std::size_t>(e.crossing)].over = (s == Sign::over) ? 0 : 1;
  }
  // Second visits must carry the opposite sign.
  for (std::size_t k = 0; k < enc.size(); ++k) {
    const Encounter& e = enc[k];
    if (e.first) continue;
    const CrossingGT& x = found[static_cast<std::size_t>(e.crossing)];
    const Sign expected = (x.over == 1) ? Sign::over : Sign::under;
    if (def.signs[k] != expected)
      throw SceneRejected("template '" + name + "': sign table inconsistent with pairing");
  }
  scene.crossings = std::move(found);

  scene.canonical_code.reserve(enc.size());
  for (std::size_t k = 0; k < enc.size(); ++k)
    scene.canonical_code.push_back({def.id_pattern[k], def.signs[k]});
  if (def.first_knot_encounter >= 0) {
    const Encounter& e = enc[static_cast<std::size_t>(def.first_knot_encounter)];
    scene.first_knot_crossing = e.crossing;
  }
  return scene;
}

}  // namespace dlo
