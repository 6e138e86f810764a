#include "dlotrace/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace dlo {

SampleMethod sample_method_from_string(const std::string& s) {
  if (s == "exclusion_radius") return SampleMethod::exclusion_radius;
  if (s == "near_parallel") return SampleMethod::near_parallel;
  if (s == "spatial_constraint") return SampleMethod::spatial_constraint;
  throw std::invalid_argument("unknown sample method: " + s);
}

std::string to_string(SampleMethod m) {
  switch (m) {
    case SampleMethod::exclusion_radius: return "exclusion_radius";
    case SampleMethod::near_parallel: return "near_parallel";
    case SampleMethod::spatial_constraint: return "spatial_constraint";
  }
  return "?";
}

namespace {

void clamp_into_canvas(Polyline& poly, int width, int height) {
  for (Vec2& p : poly) {
    p.x() = std::clamp(p.x(), 0.0, static_cast<double>(width - 1));
    p.y() = std::clamp(p.y(), 0.0, static_cast<double>(height - 1));
  }
}

struct ChainSampler {
  Rng rng;
  Eigen::AlignedBox2d box;
  double exclusion = 0.0;
  int budget = 0;
  std::vector<Vec2> sampled;

  ChainSampler(std::uint64_t seed, const Eigen::AlignedBox2d& b, double excl, int max_rej)
      : rng(seed), box(b), exclusion(excl), budget(max_rej) {}

  Vec2 draw(const std::optional<Eigen::AlignedBox2d>& region) {
    const Eigen::AlignedBox2d b = region ? box.intersection(*region) : box;
    if (b.isEmpty() || !(b.sizes().minCoeff() > 0.0))
      throw SampleBudgetError("sampling region is empty");
    for (;;) {
      const Vec2 p(rng.uniform(b.min().x(), b.max().x()), rng.uniform(b.min().y(), b.max().y()));
      bool ok = true;
      for (const Vec2& q : sampled) {
        if ((p - q).norm() < exclusion) {
          ok = false;
          break;
        }
      }
      if (ok) {
        sampled.push_back(p);
        return p;
      }
      if (--budget <= 0)
        throw SampleBudgetError("control-point rejection budget exhausted");
    }
  }
};

/// Chain of C1-joined cubics. Returns the dense polyline; `sampled` receives
/// the drawn control points (joint tangent points are derived, not drawn).
Polyline sample_chain(ChainSampler& s, int spans,
                      const std::function<std::optional<Eigen::AlignedBox2d>(int)>& region_for) {
  Polyline poly;
  const Vec2 p0 = s.draw(region_for(0));
  Vec2 p1 = s.draw(region_for(0));
  Vec2 p2 = s.draw(region_for(0));
  Vec2 p3 = s.draw(region_for(0));
  densify_bezier(p0, p1, p2, p3, 2.0, true, poly);
  for (int k = 1; k < spans; ++k) {
    const Vec2 q0 = p3;
    const Vec2 q1 = 2.0 * p3 - p2;  // C1 joint, derived
    const Vec2 q2 = s.draw(region_for(k));
    const Vec2 q3 = s.draw(region_for(k));
    densify_bezier(q0, q1, q2, q3, 2.0, false, poly);
    p2 = q2;
    p3 = q3;
  }
  return poly;
}

/// Discrete curvature magnitude at vertex i (1/px), over +-step vertices.
double curvature_at(const Polyline& poly, int i, int step) {
  const int n = static_cast<int>(poly.size());
  const int a = std::max(0, i - step);
  const int b = std::min(n - 1, i + step);
  if (b - a < 2) return 0.0;
  const Vec2 t0 = (poly[i] - poly[a]).normalized();
  const Vec2 t1 = (poly[b] - poly[i]).normalized();
  const double dang = std::atan2(std::abs(cross2(t0, t1)), t0.dot(t1));
  const double arc = (poly[i] - poly[a]).norm() + (poly[b] - poly[i]).norm();
  return arc > 1e-9 ? dang / (arc * 0.5) : 0.0;
}

Polyline with_parallel_subpath(const Polyline& base_raw, double offset) {
  const Polyline base = resample_polyline(base_raw, 1.0);
  const int n = static_cast<int>(base.size());
  if (n < 40) return {};
  const int win = std::max(20, static_cast<int>(0.35 * n));
  // Slide the window over the latter part of the curve and keep the one with
  // the least curvature; the lateral offset only stays clean where the
  // curvature radius is large against the offset.
  int best_a = -1;
  double best_kappa = std::numeric_limits<double>::max();
  const int lo = static_cast<int>(0.40 * n);
  const int hi = n - 2 - win;
  for (int a = lo; a <= hi; a += std::max(1, n / 50)) {
    double kmax = 0.0;
    for (int i = a; i < a + win; i += 4) kmax = std::max(kmax, curvature_at(base, i, 4));
    if (kmax < best_kappa) {
      best_kappa = kmax;
      best_a = a;
    }
  }
  if (best_a < 0 || best_kappa > 1.0 / (4.0 * offset)) return {};

  const int a = best_a;
  const int b = best_a + win;
  Polyline out(base.begin(), base.begin() + b + 1);
  // U-turn cap: half circle of diameter `offset` into the offset copy.
  const Vec2 t = tangent_at(base, b);
  const Vec2 nrm(-t.y(), t.x());
  const Vec2 center = base[b] + 0.5 * offset * nrm;
  const int cap_steps = std::max(6, static_cast<int>(std::ceil(kPi * offset * 0.5)));
  for (int k = 1; k <= cap_steps; ++k) {
    const double phi = kPi * k / cap_steps;
    out.push_back(center + 0.5 * offset * (-nrm * std::cos(phi) + t * std::sin(phi)));
  }
  for (int i = b - 1; i >= a; --i) {
    const Vec2 ti = tangent_at(base, i);
    out.push_back(base[i] + offset * Vec2(-ti.y(), ti.x()));
  }
  return out;
}

}  // namespace

CablePath sample_cable(std::uint64_t seed, SampleMethod method, int width, int height,
                       const SampleParams& params) {
  const double margin = std::min({params.margin, width / 4.0, height / 4.0});
  const Eigen::AlignedBox2d box(Vec2(margin, margin),
                                Vec2(width - 1 - margin, height - 1 - margin));
  if (!(box.sizes().minCoeff() > 1.0))
    throw SampleBudgetError("canvas too small to place control points");

  std::optional<Eigen::AlignedBox2d> constraint = params.constraint_region;
  if (method == SampleMethod::spatial_constraint && !constraint) {
    const double half = 0.175 * std::min(width, height);
    const Vec2 c(width / 2.0, height / 2.0);
    constraint = Eigen::AlignedBox2d(c - Vec2(half, half), c + Vec2(half, half));
  }
  const auto region_for = [&](int span) -> std::optional<Eigen::AlignedBox2d> {
    if (method != SampleMethod::spatial_constraint) return std::nullopt;
    if (span >= 2 && span < 2 + params.constrained_spans) return constraint;
    return std::nullopt;
  };

  CablePath cable;
  cable.id = 0;
  cable.thickness = params.thickness;

  int attempts = 8;
  std::uint64_t attempt_seed = seed;
  for (;;) {
    ChainSampler sampler(attempt_seed, box, params.exclusion_radius, params.max_rejections);
    Polyline poly = sample_chain(sampler, params.spans, region_for);
    if (method == SampleMethod::near_parallel) {
      poly = with_parallel_subpath(poly, params.parallel_offset);
      if (poly.empty()) {
        // Base curve too tight for the offset; redraw from a derived seed.
        if (--attempts <= 0)
          throw SampleBudgetError("no low-curvature subpath for the parallel offset");
        attempt_seed = split_seed(seed, static_cast<std::uint64_t>(1000 + attempts));
        continue;
      }
    }
    clamp_into_canvas(poly, width, height);
    cable.points = std::move(poly);
    cable.control_points = std::move(sampler.sampled);
    return cable;
  }
}

namespace {

struct DirtyRect {
  int x0 = std::numeric_limits<int>::max(), y0 = std::numeric_limits<int>::max();
  int x1 = -1, y1 = -1;
  void grow(int x0n, int y0n, int x1n, int y1n) {
    x0 = std::min(x0, x0n);
    y0 = std::min(y0, y0n);
    x1 = std::max(x1, x1n);
    y1 = std::max(y1, y1n);
  }
  bool empty() const { return x1 < x0 || y1 < y0; }
};

/// Max-combines the stroke profile of poly[first..last] into `buf`.
void stamp_stroke(ImageF& buf, DirtyRect& dirty, const Polyline& poly, int first, int last,
                  double halfwidth, double center_int, double edge_int) {
  const int w = static_cast<int>(buf.cols());
  const int h = static_cast<int>(buf.rows());
  const double reach = halfwidth + 1.0;
  for (int i = first; i < last; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[i + 1];
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - reach)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - reach)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + reach)));
    if (x1 < x0 || y1 < y0) continue;
    dirty.grow(x0, y0, x1, y1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = distance_to_segment(Vec2(x, y), a, b);
        if (d > halfwidth) continue;
        const double frac = d / halfwidth;
        const float v = static_cast<float>(center_int - (center_int - edge_int) * frac * frac);
        float& px = buf(y, x);
        if (v > px) px = v;
      }
    }
  }
}

/// Contiguous vertex range of `poly` around `idx` whose points stay within
/// `radius` of `pos`.
std::pair<int, int> local_window(const Polyline& poly, int idx, const Vec2& pos, double radius) {
  const int n = static_cast<int>(poly.size());
  idx = std::clamp(idx, 0, n - 1);
  int lo = idx, hi = idx;
  while (lo > 0 && (poly[lo - 1] - pos).norm() <= radius) --lo;
  while (hi < n - 1 && (poly[hi + 1] - pos).norm() <= radius) ++hi;
  return {lo, hi};
}

}  // namespace

ImageU8 render_scene(const Scene& scene, std::uint64_t seed, const RenderConfig& cfg) {
  Rng rng(seed);
  const int w = scene.width;
  const int h = scene.height;
  ImageF canvas(h, w);
  canvas.setConstant(static_cast<float>(cfg.background));

  std::vector<double> eff_thickness(scene.cables.size());
  for (std::size_t i = 0; i < scene.cables.size(); ++i) {
    const double jitter = cfg.thickness_jitter * rng.uniform(-1.0, 1.0);
    eff_thickness[i] = scene.cables[i].thickness * (1.0 + jitter);
  }

  // Base pass: cables in id order, later cables replacing earlier pixels.
  ImageF scratch(h, w);
  for (std::size_t i = 0; i < scene.cables.size(); ++i) {
    const CablePath& cable = scene.cables[i];
    if (cable.points.size() < 2) continue;
    scratch.setConstant(-1.0f);
    DirtyRect dirty;
    stamp_stroke(scratch, dirty, cable.points, 0, static_cast<int>(cable.points.size()) - 1,
                 eff_thickness[i] * 0.5, cfg.centerline_intensity, cfg.edge_intensity);
    if (dirty.empty()) continue;
    for (int y = dirty.y0; y <= dirty.y1; ++y)
      for (int x = dirty.x0; x <= dirty.x1; ++x)
        if (scratch(y, x) >= 0.0f) canvas(y, x) = scratch(y, x);
  }

  // Per-crossing patches: re-draw the over strand last so it runs unbroken.
  for (std::size_t ci = 0; ci < scene.crossings.size(); ++ci) {
    const CrossingGT& x = scene.crossings[ci];
    const StrandRef& over = x.over == 0 ? x.strand_a : x.strand_b;
    const StrandRef& under = x.over == 0 ? x.strand_b : x.strand_a;
    if (over.cable < 0 || over.cable >= static_cast<int>(scene.cables.size())) continue;
    const Polyline& poly = scene.cables[over.cable].points;
    if (poly.size() < 2) continue;
    const double t_over = eff_thickness[over.cable];
    const double t_under = under.cable >= 0 && under.cable < static_cast<int>(scene.cables.size())
                               ? eff_thickness[under.cable]
                               : t_over;
    double radius = t_over + t_under + 2.0;
    for (std::size_t cj = 0; cj < scene.crossings.size(); ++cj) {
      if (cj == ci) continue;
      radius = std::min(radius,
                        std::max(4.0, 0.45 * (scene.crossings[cj].position - x.position).norm()));
    }
    const auto [lo, hi] = local_window(poly, over.index, x.position, radius);
    if (hi <= lo) continue;
    const double hw = t_over * 0.5;

    if (cfg.seam) {
      // Darken cable pixels in a thin band just outside the over stroke.
      const double reach = hw + cfg.seam_width;
      const double band_floor = cfg.background + 60.0;
      int x0 = w, y0 = h, x1 = -1, y1 = -1;
      for (int i = lo; i <= hi; ++i) {
        x0 = std::min(x0, static_cast<int>(std::floor(poly[i].x() - reach)));
        x1 = std::max(x1, static_cast<int>(std::ceil(poly[i].x() + reach)));
        y0 = std::min(y0, static_cast<int>(std::floor(poly[i].y() - reach)));
        y1 = std::max(y1, static_cast<int>(std::ceil(poly[i].y() + reach)));
      }
      x0 = std::max(x0, 0);
      y0 = std::max(y0, 0);
      x1 = std::min(x1, w - 1);
      y1 = std::min(y1, h - 1);
      for (int y = y0; y <= y1; ++y) {
        for (int xx = x0; xx <= x1; ++xx) {
          double d = std::numeric_limits<double>::max();
          for (int i = lo; i < hi; ++i)
            d = std::min(d, distance_to_segment(Vec2(xx, y), poly[i], poly[i + 1]));
          if (d > hw && d <= reach && canvas(y, xx) > band_floor)
            canvas(y, xx) = std::max(0.0f, canvas(y, xx) - static_cast<float>(cfg.seam_darken));
        }
      }
    }

    scratch.setConstant(-1.0f);
    DirtyRect dirty;
    stamp_stroke(scratch, dirty, poly, lo, hi, hw, cfg.centerline_intensity, cfg.edge_intensity);
    if (dirty.empty()) continue;
    for (int y = dirty.y0; y <= dirty.y1; ++y)
      for (int xx = dirty.x0; xx <= dirty.x1; ++xx)
        if (scratch(y, xx) >= 0.0f) canvas(y, xx) = scratch(y, xx);
  }

  ImageU8 out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(y, x) = clamp_u8(canvas(y, x));
  return out;
}

ImageU8 augment_image(const ImageU8& img, std::uint64_t seed, const AugmentConfig& cfg) {
  if (!cfg.enabled) return img;
  Rng rng(seed);
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  ImageF buf(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) buf(y, x) = static_cast<float>(img(y, x));

  if (cfg.noise_sigma > 0.0) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        buf(y, x) += static_cast<float>(rng.normal(0.0, cfg.noise_sigma));
  }
  if (cfg.brightness_sigma > 0.0) {
    const float shift = static_cast<float>(rng.normal(0.0, cfg.brightness_sigma));
    buf.array() += shift;
  }
  if (cfg.sharpen) {
    // Unsharp mask with a separable 3x3 Gaussian, replicated borders.
    ImageF blur(h, w);
    const auto at = [&](const ImageF& m, int y, int x) {
      return m(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
    };
    ImageF tmp(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        tmp(y, x) = 0.25f * (at(buf, y, x - 1) + 2.0f * buf(y, x) + at(buf, y, x + 1));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        blur(y, x) = 0.25f * (at(tmp, y - 1, x) + 2.0f * tmp(y, x) + at(tmp, y + 1, x));
    buf = 2.0f * buf - blur;
  }

  ImageU8 out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(y, x) = clamp_u8(buf(y, x));
  return out;
}

namespace {

struct HitCluster {
  Vec2 position = Vec2::Zero();
  std::vector<PolylineHit> hits;
};

/// Clusters raw hits within the merge radius and reduces each cluster to a
/// CrossingGT (two strand passes). Throws SceneRejected when a cluster holds
/// three or more distinct passes.
std::vector<CrossingGT> reduce_hits(const std::vector<PolylineHit>& hits, double merge_radius) {
  std::vector<HitCluster> clusters;
  for (const PolylineHit& hit : hits) {
    HitCluster* home = nullptr;
    for (HitCluster& c : clusters) {
      if ((c.position - hit.position).norm() <= merge_radius) {
        home = &c;
        break;
      }
    }
    if (!home) {
      clusters.push_back({hit.position, {}});
      home = &clusters.back();
    }
    home->hits.push_back(hit);
    Vec2 mean = Vec2::Zero();
    for (const PolylineHit& hh : home->hits) mean += hh.position;
    home->position = mean / static_cast<double>(home->hits.size());
  }

  std::vector<CrossingGT> out;
  for (const HitCluster& c : clusters) {
    // Group the strand passes; passes on the same line within a few segments
    // of each other are the same physical pass.
    struct Pass {
      int line;
      int seg;
    };
    std::vector<Pass> passes;
    const auto add_pass = [&](int line, int seg) {
      for (Pass& p : passes) {
        if (p.line == line && std::abs(p.seg - seg) <= 4) {
          p.seg = std::min(p.seg, seg);
          return;
        }
      }
      passes.push_back({line, seg});
    };
    for (const PolylineHit& hh : c.hits) {
      add_pass(hh.line_a, hh.seg_a);
      add_pass(hh.line_b, hh.seg_b);
    }
    if (passes.size() != 2) {
      throw SceneRejected("three strand passes within the merge radius at (" +
                          std::to_string(c.position.x()) + ", " +
                          std::to_string(c.position.y()) + ")");
    }
    std::sort(passes.begin(), passes.end(), [](const Pass& a, const Pass& b) {
      return std::tie(a.line, a.seg) < std::tie(b.line, b.seg);
    });
    CrossingGT x;
    x.position = c.position;
    x.strand_a = {passes[0].line, passes[0].seg};
    x.strand_b = {passes[1].line, passes[1].seg};
    out.push_back(x);
  }
  std::sort(out.begin(), out.end(), [](const CrossingGT& a, const CrossingGT& b) {
    return std::tie(a.strand_a.cable, a.strand_a.index, a.strand_b.cable, a.strand_b.index) <
           std::tie(b.strand_a.cable, b.strand_a.index, b.strand_b.cable, b.strand_b.index);
  });
  return out;
}

}  // namespace

std::vector<CrossingGT> find_crossings(const std::vector<CablePath>& cables) {
  std::vector<Polyline> lines;
  lines.reserve(cables.size());
  for (const CablePath& c : cables) lines.push_back(c.points);
  return reduce_hits(polyline_intersections(lines), kCrossingMergeRadius);
}

std::vector<CrossingGT> ground_truth_crossings(const Scene& scene) {
  std::vector<CrossingGT> found = find_crossings(scene.cables);
  for (CrossingGT& x : found) {
    // Copy z from the stored assignment at the same position.
    int best = -1;
    double best_d = kCrossingMergeRadius;
    for (std::size_t i = 0; i < scene.crossings.size(); ++i) {
      const double d = (scene.crossings[i].position - x.position).norm();
      if (d <= best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0) {
      const CrossingGT& stored = scene.crossings[best];
      // Align the over flag with this crossing's strand order.
      const StrandRef& stored_over = stored.over == 0 ? stored.strand_a : stored.strand_b;
      const bool a_is_over = stored_over.cable == x.strand_a.cable &&
                             std::abs(stored_over.index - x.strand_a.index) <= 8;
      x.over = a_is_over ? 0 : 1;
    }
  }
  return found;
}

Scene make_random_scene(std::uint64_t seed, SampleMethod method, int n_cables, int width,
                        int height, const SampleParams& params) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : split_seed(seed, 7000 + attempt);
    Scene scene;
    scene.width = width;
    scene.height = height;
    for (int i = 0; i < n_cables; ++i) {
      CablePath c = sample_cable(split_seed(s, static_cast<std::uint64_t>(i)), method, width,
                                 height, params);
      c.id = i;
      scene.cables.push_back(std::move(c));
    }
    try {
      scene.crossings = find_crossings(scene.cables);
    } catch (const SceneRejected&) {
      continue;  // re-draw the whole scene from a derived seed
    }
    Rng zrng(split_seed(s, 999));
    for (CrossingGT& x : scene.crossings) x.over = zrng.bernoulli(0.5) ? 1 : 0;
    for (const CablePath& c : scene.cables)
      scene.endpoints.push_back({c.points.front(), c.points.back()});
    return scene;
  }
  throw SceneRejected("could not draw a semi-planar scene in 20 attempts");
}

Scene compose_scene(const std::vector<Scene>& parts, int width, int height, std::uint64_t seed) {
  Scene scene;
  scene.width = width;
  scene.height = height;
  std::vector<int> part_of_cable;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    for (const CablePath& c : parts[pi].cables) {
      CablePath copy = c;
      copy.id = static_cast<int>(scene.cables.size());
      scene.cables.push_back(std::move(copy));
      part_of_cable.push_back(static_cast<int>(pi));
    }
    scene.knotted = scene.knotted || parts[pi].knotted;
  }
  scene.crossings = find_crossings(scene.cables);

  // Cable index offset of each part in the merged scene.
  std::vector<int> offset(parts.size(), 0);
  {
    int acc = 0;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
      offset[pi] = acc;
      acc += static_cast<int>(parts[pi].cables.size());
    }
  }

  Rng zrng(split_seed(seed, 555));
  for (CrossingGT& x : scene.crossings) {
    const int pa = part_of_cable[static_cast<std::size_t>(x.strand_a.cable)];
    const int pb = part_of_cable[static_cast<std::size_t>(x.strand_b.cable)];
    bool matched = false;
    if (pa == pb) {
      for (const CrossingGT& stored : parts[static_cast<std::size_t>(pa)].crossings) {
        if ((stored.position - x.position).norm() > kCrossingMergeRadius) continue;
        const StrandRef& stored_over = stored.over == 0 ? stored.strand_a : stored.strand_b;
        const StrandRef global_over{stored_over.cable + offset[static_cast<std::size_t>(pa)],
                                    stored_over.index};
        const bool a_is_over = global_over.cable == x.strand_a.cable &&
                               std::abs(global_over.index - x.strand_a.index) <= 8;
        x.over = a_is_over ? 0 : 1;
        matched = true;
        break;
      }
    }
    if (!matched) x.over = zrng.bernoulli(0.5) ? 1 : 0;
  }
  for (const CablePath& c : scene.cables)
    scene.endpoints.push_back({c.points.front(), c.points.back()});
  return scene;
}

}  // namespace dlo
