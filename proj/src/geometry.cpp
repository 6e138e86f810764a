#include "dlotrace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace dlo {

std::optional<SegmentHit> intersect_segments(const Vec2& a0, const Vec2& a1,
                                             const Vec2& b0, const Vec2& b1) {
  const Vec2 da = a1 - a0;
  const Vec2 db = b1 - b0;
  const double denom = cross2(da, db);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const Vec2 d = b0 - a0;
  const double s = cross2(d, db) / denom;
  const double t = cross2(d, da) / denom;
  if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) return std::nullopt;
  return SegmentHit{a0 + s * da, s, t};
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-18) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double polyline_length(const Polyline& poly) {
  double len = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) len += (poly[i] - poly[i - 1]).norm();
  return len;
}

std::vector<double> cumulative_arc(const Polyline& poly) {
  std::vector<double> cum(poly.size(), 0.0);
  for (std::size_t i = 1; i < poly.size(); ++i)
    cum[i] = cum[i - 1] + (poly[i] - poly[i - 1]).norm();
  return cum;
}

Vec2 point_at_arc(const Polyline& poly, const std::vector<double>& cum, double s) {
  if (poly.empty()) return Vec2::Zero();
  if (poly.size() == 1 || s <= 0.0) return poly.front();
  if (s >= cum.back()) return poly.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double seg = cum[i] - cum[i - 1];
  const double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  return poly[i - 1] + t * (poly[i] - poly[i - 1]);
}

Vec2 tangent_at(const Polyline& poly, int i) {
  const int n = static_cast<int>(poly.size());
  if (n < 2) return Vec2(1.0, 0.0);
  const int lo = std::max(0, i - 1);
  const int hi = std::min(n - 1, i + 1);
  Vec2 d = poly[hi] - poly[lo];
  const double norm = d.norm();
  return norm > 1e-12 ? Vec2(d / norm) : Vec2(1.0, 0.0);
}

Vec2 tangent_at_arc(const Polyline& poly, const std::vector<double>& cum, double s) {
  if (poly.size() < 2) return Vec2(1.0, 0.0);
  if (s <= 0.0) return tangent_at(poly, 0);
  if (s >= cum.back()) return tangent_at(poly, static_cast<int>(poly.size()) - 1);
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const int i = static_cast<int>(it - cum.begin());
  const double seg = cum[i] - cum[i - 1];
  const double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  Vec2 d = (1.0 - t) * tangent_at(poly, i - 1) + t * tangent_at(poly, i);
  const double norm = d.norm();
  return norm > 1e-12 ? Vec2(d / norm) : tangent_at(poly, i - 1);
}

int nearest_vertex(const Polyline& poly, const Vec2& p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double d = (poly[i] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double distance_to_polyline(const Polyline& poly, const Vec2& p) {
  if (poly.empty()) return std::numeric_limits<double>::max();
  if (poly.size() == 1) return (p - poly[0]).norm();
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 1; i < poly.size(); ++i)
    best = std::min(best, distance_to_segment(p, poly[i - 1], poly[i]));
  return best;
}

Vec2 cubic_bezier(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3, double t) {
  const double u = 1.0 - t;
  return u * u * u * p0 + 3.0 * u * u * t * p1 + 3.0 * u * t * t * p2 + t * t * t * p3;
}

void densify_bezier(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3,
                    double max_spacing, bool include_first, Polyline& out) {
  // Control polygon length bounds the arc length from above.
  const double bound = (p1 - p0).norm() + (p2 - p1).norm() + (p3 - p2).norm();
  const int n = std::max(2, static_cast<int>(std::ceil(bound / std::max(0.25, max_spacing * 0.5))));
  for (int i = include_first ? 0 : 1; i <= n; ++i)
    out.push_back(cubic_bezier(p0, p1, p2, p3, static_cast<double>(i) / n));
}

Polyline catmull_rom(std::span<const Vec2> w, double max_spacing) {
  Polyline out;
  if (w.size() < 2) {
    out.assign(w.begin(), w.end());
    return out;
  }
  const auto pt = [&](int i) {
    i = std::clamp(i, 0, static_cast<int>(w.size()) - 1);
    return w[static_cast<std::size_t>(i)];
  };
  out.push_back(w[0]);
  for (int i = 0; i + 1 < static_cast<int>(w.size()); ++i) {
    const Vec2 p0 = pt(i - 1), p1 = pt(i), p2 = pt(i + 1), p3 = pt(i + 2);
    // Centripetal parameterization avoids cusps and self-loops between knots.
    const auto knot = [](double t, const Vec2& a, const Vec2& b) {
      return t + std::sqrt((b - a).norm());
    };
    const double t0 = 0.0;
    const double t1 = knot(t0, p0, p1);
    const double t2 = knot(t1, p1, p2);
    const double t3 = knot(t2, p2, p3);
    if (t2 - t1 < 1e-9) continue;
    const int n = std::max(2, static_cast<int>(std::ceil((p2 - p1).norm() / (max_spacing * 0.5))));
    for (int k = 1; k <= n; ++k) {
      const double t = t1 + (t2 - t1) * static_cast<double>(k) / n;
      const auto lerp = [](const Vec2& a, const Vec2& b, double ta, double tb, double tt) {
        return Vec2(((tb - tt) * a + (tt - ta) * b) / (tb - ta));
      };
      const Vec2 a1 = lerp(p0, p1, t0, t1, t);
      const Vec2 a2 = lerp(p1, p2, t1, t2, t);
      const Vec2 a3 = lerp(p2, p3, t2, t3, t);
      const Vec2 b1 = lerp(a1, a2, t0, t2, t);
      const Vec2 b2 = lerp(a2, a3, t1, t3, t);
      out.push_back(lerp(b1, b2, t1, t2, t));
    }
  }
  return out;
}

Polyline resample_polyline(const Polyline& poly, double spacing) {
  if (poly.size() < 2) return poly;
  const auto cum = cumulative_arc(poly);
  const double total = cum.back();
  const int n = std::max(1, static_cast<int>(std::round(total / spacing)));
  Polyline out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out.push_back(point_at_arc(poly, cum, total * i / n));
  return out;
}

namespace {

struct SegRef {
  int line;
  int seg;
};

}  // namespace

std::vector<PolylineHit> polyline_intersections(std::span<const Polyline> lines,
                                                int min_self_gap) {
  // Uniform grid over segment bounding boxes; only segments sharing a cell
  // are tested pairwise.
  constexpr double kCell = 8.0;
  std::unordered_map<std::int64_t, std::vector<SegRef>> grid;
  const auto key = [](int cx, int cy) {
    return (static_cast<std::int64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
  };
  for (int li = 0; li < static_cast<int>(lines.size()); ++li) {
    const Polyline& poly = lines[li];
    for (int si = 0; si + 1 < static_cast<int>(poly.size()); ++si) {
      const Vec2& a = poly[si];
      const Vec2& b = poly[si + 1];
      const int x0 = static_cast<int>(std::floor(std::min(a.x(), b.x()) / kCell));
      const int x1 = static_cast<int>(std::floor(std::max(a.x(), b.x()) / kCell));
      const int y0 = static_cast<int>(std::floor(std::min(a.y(), b.y()) / kCell));
      const int y1 = static_cast<int>(std::floor(std::max(a.y(), b.y()) / kCell));
      for (int cx = x0; cx <= x1; ++cx)
        for (int cy = y0; cy <= y1; ++cy) grid[key(cx, cy)].push_back({li, si});
    }
  }

  const auto skip = [&](const SegRef& a, const SegRef& b) {
    if (a.line != b.line) return false;
    return std::abs(a.seg - b.seg) <= min_self_gap;
  };

  std::vector<PolylineHit> hits;
  std::unordered_map<std::uint64_t, bool> seen;
  for (const auto& [cell, refs] : grid) {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      for (std::size_t j = i + 1; j < refs.size(); ++j) {
        SegRef a = refs[i], b = refs[j];
        if (a.line > b.line || (a.line == b.line && a.seg > b.seg)) std::swap(a, b);
        if (skip(a, b)) continue;
        const std::uint64_t pair_key =
            ((static_cast<std::uint64_t>(a.line) & 0xff) << 56) |
            ((static_cast<std::uint64_t>(a.seg) & 0xffffff) << 32) |
            ((static_cast<std::uint64_t>(b.line) & 0xff) << 24) |
            (static_cast<std::uint64_t>(b.seg) & 0xffffff);
        if (seen.count(pair_key)) continue;
        seen.emplace(pair_key, true);
        const Polyline& pa = lines[a.line];
        const Polyline& pb = lines[b.line];
        if (auto hit = intersect_segments(pa[a.seg], pa[a.seg + 1], pb[b.seg], pb[b.seg + 1]))
          hits.push_back({hit->point, a.line, a.seg, b.line, b.seg});
      }
    }
  }
  // Grid iteration order is unspecified; sort for a deterministic result.
  std::sort(hits.begin(), hits.end(), [](const PolylineHit& a, const PolylineHit& b) {
    return std::tie(a.line_a, a.seg_a, a.line_b, a.seg_b) <
           std::tie(b.line_a, b.seg_a, b.line_b, b.seg_b);
  });
  return hits;
}

}  // namespace dlo
