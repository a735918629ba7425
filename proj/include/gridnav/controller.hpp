#pragma once

#include <functional>
#include <random>

#include "plan.hpp"

namespace gridnav {

enum class PrimitiveKind { Forward, Backward, RotClk, RotAclk };

inline const char* primitive_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Forward: return "forward";
    case PrimitiveKind::Backward: return "backward";
    case PrimitiveKind::RotClk: return "rot-cw";
    case PrimitiveKind::RotAclk: return "rot-ccw";
  }
  return "?";
}

// rotation_deg is the commanded magnitude; compensation marks the short
// backward move issued after a rotation rather than a full step.
struct MotionPrimitive {
  PrimitiveKind kind = PrimitiveKind::Forward;
  double rotation_deg = 0.0;
  bool compensation = false;
};

struct ControllerParams {
  double step_length = 6.46;      // distance of one forward/backward step
  double angle_deadband = 1.5;    // stop rotating below this error, degrees
  double backstep_distance = 0.0; // compensation move after each rotation; 0 disables
  bool calibrated = false;        // apply measured effective rotations
  std::vector<double> rotation_steps = {6.0, 4.5, 3.0, 1.5};
};

// Measured turn-in-place behavior: turning from theta_from to theta_to
// (gamma degrees total) with repeated nominal commands lands on the effective
// per-command rotation; gain() is how many effective rotations cover gamma.
struct CalibrationRow {
  double theta_from = 0.0;
  double theta_to = 0.0;
  double gamma = 0.0;
  double nominal = 0.0;
  double effective = 0.0;

  double gain() const { return gamma / effective; }
};

inline const std::array<CalibrationRow, 4>& rotation_calibration() {
  static const std::array<CalibrationRow, 4> rows{{
      {45.0, 20.0, 25.0, 6.0, 5.947},
      {40.0, 20.0, 20.0, 4.5, 4.535},
      {35.0, 20.0, 15.0, 3.0, 3.072},
      {30.0, 20.0, 10.0, 1.5, 1.485},
  }};
  return rows;
}

// Effective rotation for a commanded magnitude; unmeasured magnitudes pass
// through unchanged.
inline double calibrated_rotation(double nominal) {
  for (const CalibrationRow& row : rotation_calibration())
    if (std::abs(row.nominal - nominal) <= kEps) return row.effective;
  return nominal;
}

struct NoiseModel {
  double sigma_pos = 0.0;  // stddev added to translation distances
  double sigma_ang = 0.0;  // stddev added to rotation angles, degrees
};

namespace detail {

inline double gauss(double sigma, const NoiseModel* noise, std::mt19937_64* rng) {
  if (!noise || !rng || sigma <= 0.0) return 0.0;
  std::normal_distribution<double> d(0.0, sigma);
  return d(*rng);
}

}  // namespace detail

inline Pose apply_primitive(const Pose& pose, const MotionPrimitive& prim,
                            const ControllerParams& params, const NoiseModel* noise = nullptr,
                            std::mt19937_64* rng = nullptr) {
  Pose out = pose;
  switch (prim.kind) {
    case PrimitiveKind::Forward:
    case PrimitiveKind::Backward: {
      double d = prim.compensation ? params.backstep_distance : params.step_length;
      d += detail::gauss(noise ? noise->sigma_pos : 0.0, noise, rng);
      if (prim.kind == PrimitiveKind::Backward) d = -d;
      double rad = deg_to_rad(pose.theta);
      out.x += d * std::cos(rad);
      out.y += d * std::sin(rad);
      break;
    }
    case PrimitiveKind::RotClk:
    case PrimitiveKind::RotAclk: {
      double rho = params.calibrated ? calibrated_rotation(prim.rotation_deg) : prim.rotation_deg;
      rho += detail::gauss(noise ? noise->sigma_ang : 0.0, noise, rng);
      if (prim.kind == PrimitiveKind::RotClk) rho = -rho;
      out.theta = wrap_deg(out.theta + rho);
      break;
    }
  }
  return out;
}

// Greedy cascade: while the remaining error is at least the deadband, issue
// the largest available rotation not exceeding it (the largest one caps
// bigger errors). Each iteration removes at least the smallest step, so the
// residual ends strictly below the deadband.
inline std::vector<MotionPrimitive> rotation_schedule(double theta_err_deg,
                                                      const ControllerParams& params) {
  if (params.rotation_steps.empty()) throw std::invalid_argument("empty rotation step set");
  std::vector<double> steps = params.rotation_steps;
  std::sort(steps.begin(), steps.end(), std::greater<>());
  for (double s : steps)
    if (!(s > 0.0)) throw std::invalid_argument("rotation steps must be positive");
  if (std::abs(params.angle_deadband - steps.back()) > kEps)
    throw std::invalid_argument("angle deadband must equal the smallest rotation step");

  std::vector<MotionPrimitive> out;
  double remaining = theta_err_deg;
  while (std::abs(remaining) >= params.angle_deadband) {
    double mag = std::abs(remaining);
    double rho = steps.front();
    for (double s : steps) {
      if (s <= mag) {
        rho = s;
        break;
      }
    }
    out.push_back({remaining > 0 ? PrimitiveKind::RotAclk : PrimitiveKind::RotClk, rho, false});
    if (params.backstep_distance != 0.0)
      out.push_back({PrimitiveKind::Backward, 0.0, true});
    remaining -= (remaining > 0 ? rho : -rho);
  }
  return out;
}

struct TraceStep {
  MotionPrimitive primitive;
  Pose pose;  // pose after applying the primitive
};

struct PrimitiveTrace {
  std::vector<TraceStep> steps;
  Pose final;
};

// Line-of-sight leg: rotate toward the waypoint until the bearing error is
// inside the deadband, then take round(distance / step_length) forward steps.
// The schedule is fixed from the initial bearing; the step count uses the
// post-rotation distance.
inline PrimitiveTrace los_navigate(const Pose& pose, const Point& waypoint,
                                   const ControllerParams& params,
                                   const NoiseModel* noise = nullptr,
                                   std::mt19937_64* rng = nullptr) {
  PrimitiveTrace trace;
  Pose cur = pose;
  if (distance(pose.position(), waypoint) > kEps) {
    double err = effective_angle(cur, waypoint);
    for (const MotionPrimitive& prim : rotation_schedule(err, params)) {
      cur = apply_primitive(cur, prim, params, noise, rng);
      trace.steps.push_back({prim, cur});
    }
    double dist = distance(cur.position(), waypoint);
    long n = std::lround(dist / params.step_length);
    for (long i = 0; i < n; i++) {
      MotionPrimitive fwd{PrimitiveKind::Forward, 0.0, false};
      cur = apply_primitive(cur, fwd, params, noise, rng);
      trace.steps.push_back({fwd, cur});
    }
  }
  trace.final = cur;
  return trace;
}

struct Trajectory {
  std::vector<PrimitiveTrace> legs;
  std::vector<double> arrival_errors;  // one per plan waypoint
  Pose final;
};

// Follows the plan's waypoints with one line-of-sight leg each. A waypoint
// already under the robot produces no leg, only its arrival error.
inline Trajectory execute_plan(const MotionPlan& plan, const Pose& init,
                               const ControllerParams& params, const NoiseModel* noise = nullptr,
                               std::mt19937_64* rng = nullptr) {
  Trajectory traj;
  Pose cur = init;
  for (const Waypoint& w : plan.waypoints) {
    if (distance(cur.position(), w.position()) > kEps) {
      traj.legs.push_back(los_navigate(cur, w.position(), params, noise, rng));
      cur = traj.legs.back().final;
    }
    traj.arrival_errors.push_back(distance(cur.position(), w.position()));
  }
  traj.final = cur;
  return traj;
}

}  // namespace gridnav
