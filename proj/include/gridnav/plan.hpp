#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "smt_encode.hpp"

namespace gridnav {

enum class PlannerKind { Smt, SmtKinematic, Bfs, AStar };

inline const char* planner_name(PlannerKind k) {
  switch (k) {
    case PlannerKind::Smt: return "smt";
    case PlannerKind::SmtKinematic: return "smt-kin";
    case PlannerKind::Bfs: return "bfs";
    case PlannerKind::AStar: return "astar";
  }
  return "?";
}

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> theta;  // kinematic plans carry headings

  Point position() const { return {x, y}; }
};

struct GraphStats {
  long nodes = 0;
  long edges = 0;  // directed
  long expanded = 0;
};

struct MotionPlan {
  std::vector<Waypoint> waypoints;
  PlannerKind planner = PlannerKind::Smt;
  std::optional<EncodingStats> smt_stats;
  std::optional<GraphStats> graph_stats;
  double encode_time_s = 0.0;
  double solve_time_s = 0.0;
};

inline double path_length(const std::vector<Waypoint>& wps) {
  double len = 0.0;
  for (size_t i = 1; i < wps.size(); i++) len += distance(wps[i - 1].position(), wps[i].position());
  return len;
}

struct Violation {
  enum class Kind { WaypointInObstacle, SegmentHitsObstacle };
  Kind kind = Kind::WaypointInObstacle;
  int index = 0;     // waypoint index, or segment index (segment i joins i and i+1)
  int obstacle = 0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Geometric check, independent of any planner: no waypoint inside an
// obstacle, no segment between consecutive waypoints crossing one.
inline ValidationReport validate_plan(const MotionPlan& plan,
                                      const std::vector<ObstacleRect>& obstacles) {
  ValidationReport rep;
  for (size_t i = 0; i < plan.waypoints.size(); i++) {
    for (size_t j = 0; j < obstacles.size(); j++) {
      if (point_in_rect(plan.waypoints[i].position(), obstacles[j])) {
        rep.ok = false;
        rep.violations.push_back(
            {Violation::Kind::WaypointInObstacle, static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  for (size_t i = 0; i + 1 < plan.waypoints.size(); i++) {
    for (size_t j = 0; j < obstacles.size(); j++) {
      if (segment_intersects_rect(plan.waypoints[i].position(), plan.waypoints[i + 1].position(),
                                  obstacles[j])) {
        rep.ok = false;
        rep.violations.push_back(
            {Violation::Kind::SegmentHitsObstacle, static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return rep;
}

}  // namespace gridnav
