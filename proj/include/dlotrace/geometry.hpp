#pragma once

#include "dlotrace/core.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dlo {

/// Dense 2-D polyline, pixel coordinates, sub-pixel precision.
using Polyline = std::vector<Vec2>;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Proper intersection of segments a0-a1 and b0-b1. `s` and `t` are the curve
/// parameters of the hit on each segment, both in [0, 1]. Parallel and
/// collinear pairs report no hit.
struct SegmentHit {
  Vec2 point;
  double s = 0.0;
  double t = 0.0;
};
std::optional<SegmentHit> intersect_segments(const Vec2& a0, const Vec2& a1,
                                             const Vec2& b0, const Vec2& b1);

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

double polyline_length(const Polyline& poly);

/// cum[i] = arc length from poly[0] to poly[i]; cum[0] = 0.
std::vector<double> cumulative_arc(const Polyline& poly);

/// Point at arc length s (clamped to [0, total]).
Vec2 point_at_arc(const Polyline& poly, const std::vector<double>& cum, double s);

/// Unit tangent at vertex i, central difference; one-sided at the ends.
Vec2 tangent_at(const Polyline& poly, int i);

/// Unit tangent at arc length s, interpolated between vertex tangents.
Vec2 tangent_at_arc(const Polyline& poly, const std::vector<double>& cum, double s);

int nearest_vertex(const Polyline& poly, const Vec2& p);

double distance_to_polyline(const Polyline& poly, const Vec2& p);

Vec2 cubic_bezier(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3, double t);

/// Samples the cubic at enough parameter steps that consecutive points are
/// at most `max_spacing` apart. The first point is included only if
/// `include_first`, so chained spans do not duplicate joints.
void densify_bezier(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3,
                    double max_spacing, bool include_first, Polyline& out);

/// Centripetal Catmull-Rom through the waypoints, endpoints included.
Polyline catmull_rom(std::span<const Vec2> waypoints, double max_spacing);

/// Resamples to roughly uniform spacing along arc length.
Polyline resample_polyline(const Polyline& poly, double spacing);

/// One raw intersection event between two polyline segments.
struct PolylineHit {
  Vec2 position;
  int line_a = 0, seg_a = 0;  // line index and segment index (segment i spans points i..i+1)
  int line_b = 0, seg_b = 0;
};

/// All segment-pair intersections over a set of polylines, including
/// self-intersections. Segment pairs of the same line closer than
/// `min_self_gap` indices apart are skipped (a curve trivially "touches"
/// itself at shared vertices). Grid-accelerated; the test suite checks it
/// against a naive all-pairs scan.
std::vector<PolylineHit> polyline_intersections(std::span<const Polyline> lines,
                                                int min_self_gap = 4);

}  // namespace dlo
