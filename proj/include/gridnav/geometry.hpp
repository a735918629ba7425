#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace gridnav {

constexpr double kEps = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Heading in degrees, kept in (-180, 180].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Point position() const { return {x, y}; }
};

// Normalize an angle in degrees to (-180, 180].
inline double wrap_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  else if (r > 180.0) r -= 360.0;
  // fmod can return -0.0; keep the canonical zero.
  if (r == 0.0) r = 0.0;
  return r;
}

inline double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

// Axis-aligned rectangle, closed set, corners (x_bl, y_bl) and (x_tr, y_tr).
struct ObstacleRect {
  double x_bl = 0.0;
  double y_bl = 0.0;
  double x_tr = 0.0;
  double y_tr = 0.0;

  double width() const { return x_tr - x_bl; }
  double height() const { return y_tr - y_bl; }
  bool valid() const { return x_bl <= x_tr && y_bl <= y_tr; }
};

struct Workspace {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(const Point& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

// Line a*x + b*y + c = 0 used as a separating line certificate.
struct SeparatingLine {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double eval(const Point& p) const { return a * p.x + b * p.y + c; }
};

inline bool point_in_rect(const Point& p, const ObstacleRect& r) {
  return p.x >= r.x_bl && p.x <= r.x_tr && p.y >= r.y_bl && p.y <= r.y_tr;
}

namespace detail {

inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool on_segment(const Point& p, const Point& q, const Point& r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
         std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

inline bool segments_intersect(const Point& p1, const Point& p2, const Point& q1,
                               const Point& q2) {
  double d1 = cross(q1, q2, p1);
  double d2 = cross(q1, q2, p2);
  double d3 = cross(p1, p2, q1);
  double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, p1, q2)) return true;
  if (d2 == 0 && on_segment(q1, p2, q2)) return true;
  if (d3 == 0 && on_segment(p1, q1, p2)) return true;
  if (d4 == 0 && on_segment(p1, q2, p2)) return true;
  return false;
}

}  // namespace detail

// Closed-set test: touching the boundary counts as intersecting.
inline bool segment_intersects_rect(const Point& p, const Point& q, const ObstacleRect& r) {
  if (point_in_rect(p, r) || point_in_rect(q, r)) return true;
  Point bl{r.x_bl, r.y_bl}, br{r.x_tr, r.y_bl}, tr{r.x_tr, r.y_tr}, tl{r.x_bl, r.y_tr};
  return detail::segments_intersect(p, q, bl, br) || detail::segments_intersect(p, q, br, tr) ||
         detail::segments_intersect(p, q, tr, tl) || detail::segments_intersect(p, q, tl, bl);
}

// Find a line strictly separating a segment from a rectangle. The candidate
// axes (two grid axes plus the segment normal) are sufficient for an AABB vs
// segment pair: if they are disjoint, one of these axes has a projection gap.
// Returns nullopt exactly when segment_intersects_rect is true.
inline std::optional<SeparatingLine> find_separating_line(const Point& p, const Point& q,
                                                          const ObstacleRect& r) {
  std::array<Point, 3> axes{{{1.0, 0.0}, {0.0, 1.0}, {q.y - p.y, p.x - q.x}}};
  std::array<Point, 4> corners{{{r.x_bl, r.y_bl}, {r.x_tr, r.y_bl}, {r.x_tr, r.y_tr}, {r.x_bl, r.y_tr}}};
  for (const Point& ax : axes) {
    if (ax.x == 0.0 && ax.y == 0.0) continue;
    double seg_lo = std::min(ax.x * p.x + ax.y * p.y, ax.x * q.x + ax.y * q.y);
    double seg_hi = std::max(ax.x * p.x + ax.y * p.y, ax.x * q.x + ax.y * q.y);
    double rect_lo = std::numeric_limits<double>::infinity();
    double rect_hi = -std::numeric_limits<double>::infinity();
    for (const Point& cpt : corners) {
      double v = ax.x * cpt.x + ax.y * cpt.y;
      rect_lo = std::min(rect_lo, v);
      rect_hi = std::max(rect_hi, v);
    }
    if (seg_hi < rect_lo) return SeparatingLine{ax.x, ax.y, -(seg_hi + rect_lo) / 2.0};
    if (rect_hi < seg_lo) return SeparatingLine{ax.x, ax.y, -(rect_hi + seg_lo) / 2.0};
  }
  return std::nullopt;
}

// Bearing error from the robot's heading to the target, degrees in (-180, 180].
// Positive means the target is to the left (counterclockwise).
inline double effective_angle(const Pose& pose, const Point& goal) {
  double dx = goal.x - pose.x;
  double dy = goal.y - pose.y;
  if (dx == 0.0 && dy == 0.0)
    throw std::invalid_argument("effective_angle: goal coincides with pose");
  return wrap_deg(rad_to_deg(std::atan2(dy, dx)) - pose.theta);
}

}  // namespace gridnav
