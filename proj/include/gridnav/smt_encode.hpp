#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace gridnav {

enum class EncodingKind { Pwl, Kinematic, KinematicOptimized };

struct EncodingStats {
  int num_constraints = 0;
  int num_variables = 0;
};

struct SmtScript {
  std::string text;
  std::vector<std::string> variable_names;
  EncodingStats stats;
  EncodingKind kind = EncodingKind::Pwl;
};

// Inputs shared by both encodings. obstacles must already be inflated.
struct PlanningProblem {
  Pose init;
  Pose goal;
  int waypoint_budget = 8;     // number of motion steps M; M+1 poses
  double move_bound = 6.0;     // strict per-axis displacement bound v
  Workspace workspace;
  std::vector<ObstacleRect> obstacles;
};

struct KinematicParams {
  double v_x = 6.46;  // forward/backward step x gain
  double v_y = 6.46;
  // allowed per-step rotations in degrees; must be symmetric about zero
  std::vector<double> rotations = {6.0, 4.5, 3.0, 1.5, -1.5, -3.0, -4.5, -6.0};
  double goal_tolerance = 0.5;  // per-axis position slack at the goal
};

// Renders a double as an SMT-LIB real literal. Negative values are wrapped as
// (- v) since a leading minus sign is not valid SMT-LIB.
inline std::string smt_literal(double v) {
  double a = v < 0.0 ? -v : v;
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, a);
  std::string s(buf, end);
  if (s.find('e') != std::string::npos || s.find('E') != std::string::npos) {
    // SMT-LIB has no exponent notation for reals
    std::snprintf(buf, sizeof buf, "%.17f", a);
    s = buf;
    size_t last = s.find_last_not_of('0');
    if (s[last] == '.') last++;
    s.resize(last + 1);
  }
  if (s.find('.') == std::string::npos) s += ".0";
  return v < 0.0 ? "(- " + s + ")" : s;
}

namespace detail {

inline std::string trig_literal(double v) {
  // rotation-matrix constants: enough digits to round-trip a double
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v < 0.0 ? -v : v);
  std::string s(buf);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
  if (s.find('e') != std::string::npos) return smt_literal(v);
  return v < 0.0 ? "(- " + s + ")" : s;
}

struct ScriptBuilder {
  std::string text;
  std::vector<std::string> names;
  int asserts = 0;

  void line(const std::string& s) {
    text += s;
    text += '\n';
  }
  void declare(const std::string& name, const char* sort = "Real") {
    line("(declare-const " + name + " " + sort + ")");
    names.push_back(name);
  }
  void assert_(const std::string& body) {
    line("(assert " + body + ")");
    asserts++;
  }
};

inline void validate_problem(const PlanningProblem& p) {
  const Workspace& ws = p.workspace;
  if (ws.x_min >= ws.x_max || ws.y_min >= ws.y_max)
    throw std::invalid_argument("workspace is empty");
  if (p.waypoint_budget < 1) throw std::invalid_argument("waypoint budget must be at least 1");
  if (!(p.move_bound > 0.0) || p.move_bound >= std::min(ws.width(), ws.height()))
    throw std::invalid_argument("move bound must be positive and below the workspace size");
  if (!ws.contains(p.init.position())) throw std::invalid_argument("init outside workspace");
  if (!ws.contains(p.goal.position())) throw std::invalid_argument("goal outside workspace");
  for (size_t j = 0; j < p.obstacles.size(); j++) {
    if (!p.obstacles[j].valid()) throw std::invalid_argument("degenerate obstacle rectangle");
    if (point_in_rect(p.init.position(), p.obstacles[j]))
      throw std::invalid_argument("init inside obstacle " + std::to_string(j));
    if (point_in_rect(p.goal.position(), p.obstacles[j]))
      throw std::invalid_argument("goal inside obstacle " + std::to_string(j));
  }
}

inline std::string avoid_rect(const std::string& xv, const std::string& yv,
                              const ObstacleRect& r) {
  return "(not (and (>= " + xv + " " + smt_literal(r.x_bl) + ") (<= " + xv + " " +
         smt_literal(r.x_tr) + ") (>= " + yv + " " + smt_literal(r.y_bl) + ") (<= " + yv + " " +
         smt_literal(r.y_tr) + ")))";
}

inline std::string in_workspace(const std::string& xv, const std::string& yv,
                                const Workspace& ws) {
  return "(and (>= " + xv + " " + smt_literal(ws.x_min) + ") (<= " + xv + " " +
         smt_literal(ws.x_max) + ") (>= " + yv + " " + smt_literal(ws.y_min) + ") (<= " + yv +
         " " + smt_literal(ws.y_max) + "))";
}

inline void emit_prelude(ScriptBuilder& b) {
  b.line("(set-option :pp.decimal true)");
  b.line("(set-option :pp.decimal_precision 12)");
  b.line("(set-logic QF_NRA)");
}

}  // namespace detail

// Counts (declare-const ...) / (declare-fun ...) lines and top-level
// (assert ...) lines of a script.
inline EncodingStats count_stats(const std::string& text) {
  EncodingStats st;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.rfind("(assert", 0) == 0) st.num_constraints++;
    else if (line.rfind("(declare-const", 0) == 0 || line.rfind("(declare-fun", 0) == 0)
      st.num_variables++;
    pos = end + 1;
  }
  return st;
}

// Piecewise-linear waypoint encoding. Waypoints x_t, y_t for t = 0..M plus a
// separating line (a, b, c) per segment t = 1..M and obstacle j. Segments are
// kept collision-free by requiring both endpoints strictly on one side of the
// line while the obstacle's corners lie strictly on the other.
inline SmtScript encode_pwl(const PlanningProblem& p) {
  detail::validate_problem(p);
  const int M = p.waypoint_budget;
  const int N = static_cast<int>(p.obstacles.size());
  detail::ScriptBuilder b;
  detail::emit_prelude(b);

  auto xv = [](int t) { return "x_" + std::to_string(t); };
  auto yv = [](int t) { return "y_" + std::to_string(t); };
  for (int t = 0; t <= M; t++) {
    b.declare(xv(t));
    b.declare(yv(t));
  }
  for (int t = 1; t <= M; t++) {
    for (int j = 0; j < N; j++) {
      std::string suf = "_" + std::to_string(t) + "_" + std::to_string(j);
      b.declare("a" + suf);
      b.declare("b" + suf);
      b.declare("c" + suf);
    }
  }

  b.assert_("(and (= x_0 " + smt_literal(p.init.x) + ") (= y_0 " + smt_literal(p.init.y) + "))");

  // reach the goal at some step and stay there
  std::string gx = smt_literal(p.goal.x), gy = smt_literal(p.goal.y);
  auto at_goal = [&](int t) {
    return "(and (= " + xv(t) + " " + gx + ") (= " + yv(t) + " " + gy + "))";
  };
  std::string reach = "(or";
  for (int t = 1; t <= M; t++) reach += " " + at_goal(t);
  reach += ")";
  if (M == 1) {
    b.assert_(reach);
  } else {
    std::string goal = "(and " + reach;
    for (int t = 1; t < M; t++) goal += " (=> " + at_goal(t) + " " + at_goal(t + 1) + ")";
    goal += ")";
    b.assert_(goal);
  }

  for (int t = 0; t <= M; t++) b.assert_(detail::in_workspace(xv(t), yv(t), p.workspace));

  for (int t = 0; t <= M; t++)
    for (int j = 0; j < N; j++) b.assert_(detail::avoid_rect(xv(t), yv(t), p.obstacles[j]));

  for (int t = 1; t <= M; t++) {
    for (int j = 0; j < N; j++) {
      std::string suf = "_" + std::to_string(t) + "_" + std::to_string(j);
      std::string a = "a" + suf, bb = "b" + suf, c = "c" + suf;
      const ObstacleRect& r = p.obstacles[j];
      auto side = [&](const std::string& px, const std::string& py) {
        return "(+ (* " + a + " " + px + ") (* " + bb + " " + py + ") " + c + ")";
      };
      auto corner = [&](double cx, double cy) { return side(smt_literal(cx), smt_literal(cy)); };
      std::string seg_neg = "(and (< " + side(xv(t - 1), yv(t - 1)) + " 0.0) (< " +
                            side(xv(t), yv(t)) + " 0.0)";
      std::string rect_pos;
      std::string seg_pos = "(and (> " + side(xv(t - 1), yv(t - 1)) + " 0.0) (> " +
                            side(xv(t), yv(t)) + " 0.0)";
      std::string rect_neg;
      for (auto [cx, cy] : {std::pair{r.x_bl, r.y_bl}, {r.x_tr, r.y_bl}, {r.x_tr, r.y_tr},
                            {r.x_bl, r.y_tr}}) {
        rect_pos += " (> " + corner(cx, cy) + " 0.0)";
        rect_neg += " (< " + corner(cx, cy) + " 0.0)";
      }
      b.assert_("(or " + seg_neg + rect_pos + ") " + seg_pos + rect_neg + "))");
    }
  }

  std::string v = smt_literal(p.move_bound);
  for (int t = 0; t < M; t++) {
    std::string x0 = xv(t), x1 = xv(t + 1), y0 = yv(t), y1 = yv(t + 1);
    b.assert_("(and (< (- " + x1 + " " + x0 + ") " + v + ") (< (- " + x0 + " " + x1 + ") " + v +
              ") (< (- " + y1 + " " + y0 + ") " + v + ") (< (- " + y0 + " " + y1 + ") " + v +
              "))");
  }

  b.line("(check-sat)");
  std::string gv = "(get-value (";
  for (int t = 0; t <= M; t++) gv += (t ? " " : "") + xv(t) + " " + yv(t);
  gv += "))";
  b.line(gv);

  SmtScript script;
  script.text = std::move(b.text);
  script.variable_names = std::move(b.names);
  script.stats = {b.asserts, static_cast<int>(script.variable_names.size())};
  script.kind = EncodingKind::Pwl;
  return script;
}

// Motion-primitive encoding. Each step is a disjunction over forward,
// backward, stay, and one rotation per allowed angle. Heading cosine/sine are
// tracked as variables and updated by angle addition with constants fixed at
// emission time, which keeps every constraint polynomial.
inline SmtScript encode_kinematic(const PlanningProblem& p, const KinematicParams& kp,
                                  bool minimize_turns, bool solver_supports_omt = true) {
  detail::validate_problem(p);
  if (!(kp.v_x > 0.0) || !(kp.v_y > 0.0)) throw std::invalid_argument("step gains must be positive");
  if (kp.rotations.empty()) throw std::invalid_argument("rotation set must be non-empty");
  for (double r : kp.rotations) {
    if (r == 0.0 || std::abs(r) >= 180.0)
      throw std::invalid_argument("rotations must be nonzero and within (-180, 180)");
    bool mirrored = false;
    for (double s : kp.rotations) mirrored |= (s == -r);
    if (!mirrored) throw std::invalid_argument("rotation set must be symmetric about zero");
  }
  if (!(p.init.theta > -180.0 && p.init.theta <= 180.0) ||
      !(p.goal.theta > -180.0 && p.goal.theta <= 180.0))
    throw std::invalid_argument("headings must lie in (-180, 180]");
  if (minimize_turns && !solver_supports_omt)
    throw std::invalid_argument("turn minimization requires a solver with optimization support");

  const int M = p.waypoint_budget;
  const int N = static_cast<int>(p.obstacles.size());
  const bool opt = minimize_turns;
  detail::ScriptBuilder b;
  detail::emit_prelude(b);

  auto xv = [](int t) { return "x_" + std::to_string(t); };
  auto yv = [](int t) { return "y_" + std::to_string(t); };
  auto th = [](int t) { return "theta_" + std::to_string(t); };
  auto cs = [](int t) { return "cos_" + std::to_string(t); };
  auto sn = [](int t) { return "sin_" + std::to_string(t); };
  auto wr = [](int t) { return "wrap_" + std::to_string(t); };
  auto tn = [](int t) { return "turn_" + std::to_string(t); };

  for (int t = 0; t <= M; t++) {
    b.declare(xv(t));
    b.declare(yv(t));
    b.declare(th(t));
    b.declare(cs(t));
    b.declare(sn(t));
  }
  for (int t = 0; t < M; t++) b.declare(wr(t));
  if (opt)
    for (int t = 0; t + 2 <= M; t++) b.declare(tn(t), "Int");

  b.assert_("(and (= x_0 " + smt_literal(p.init.x) + ") (= y_0 " + smt_literal(p.init.y) +
            ") (= theta_0 " + smt_literal(p.init.theta) + ") (= cos_0 " +
            detail::trig_literal(std::cos(deg_to_rad(p.init.theta))) + ") (= sin_0 " +
            detail::trig_literal(std::sin(deg_to_rad(p.init.theta))) + "))");

  for (int t = 1; t <= M; t++)
    b.assert_("(and (< (- 180.0) " + th(t) + ") (<= " + th(t) + " 180.0))");

  std::string vx = smt_literal(kp.v_x), vy = smt_literal(kp.v_y);
  for (int t = 0; t < M; t++) {
    auto keep_pose = "(= " + xv(t + 1) + " " + xv(t) + ") (= " + yv(t + 1) + " " + yv(t) + ")";
    auto keep_heading = "(= " + th(t + 1) + " " + th(t) + ") (= " + cs(t + 1) + " " + cs(t) +
                        ") (= " + sn(t + 1) + " " + sn(t) + ")";
    std::string no_wrap = "(= " + wr(t) + " 0.0)";
    std::string step = "(or";
    // forward
    step += " (and (= " + xv(t + 1) + " (+ " + xv(t) + " (* " + vx + " " + cs(t) + "))) (= " +
            yv(t + 1) + " (+ " + yv(t) + " (* " + vy + " " + sn(t) + "))) " + keep_heading +
            " " + no_wrap + ")";
    // backward
    step += " (and (= " + xv(t + 1) + " (- " + xv(t) + " (* " + vx + " " + cs(t) + "))) (= " +
            yv(t + 1) + " (- " + yv(t) + " (* " + vy + " " + sn(t) + "))) " + keep_heading +
            " " + no_wrap + ")";
    // stay
    step += " (and " + keep_pose + " " + keep_heading + " " + no_wrap + ")";
    for (double rho : kp.rotations) {
      std::string c = detail::trig_literal(std::cos(deg_to_rad(rho)));
      std::string s = detail::trig_literal(std::sin(deg_to_rad(rho)));
      step += " (and " + keep_pose + " (= " + th(t + 1) + " (- (+ " + th(t) + " " +
              smt_literal(rho) + ") " + wr(t) + ")) (= " + cs(t + 1) + " (- (* " + cs(t) + " " +
              c + ") (* " + sn(t) + " " + s + "))) (= " + sn(t + 1) + " (+ (* " + sn(t) + " " +
              c + ") (* " + cs(t) + " " + s + "))) (or (= " + wr(t) + " 0.0) (= " + wr(t) +
              " 360.0) (= " + wr(t) + " (- 360.0))))";
    }
    step += ")";
    b.assert_(step);
  }

  for (int t = 0; t <= M; t++) b.assert_(detail::in_workspace(xv(t), yv(t), p.workspace));
  for (int t = 0; t <= M; t++)
    for (int j = 0; j < N; j++) b.assert_(detail::avoid_rect(xv(t), yv(t), p.obstacles[j]));

  std::string eps = smt_literal(kp.goal_tolerance);
  std::string gx = smt_literal(p.goal.x), gy = smt_literal(p.goal.y);
  std::string gth = smt_literal(p.goal.theta);
  std::string reach = "(or";
  for (int t = 1; t <= M; t++) {
    reach += " (and (<= (- " + xv(t) + " " + gx + ") " + eps + ") (<= (- " + gx + " " + xv(t) +
             ") " + eps + ") (<= (- " + yv(t) + " " + gy + ") " + eps + ") (<= (- " + gy + " " +
             yv(t) + ") " + eps + ") (= " + th(t) + " " + gth + "))";
  }
  reach += ")";
  b.assert_(reach);

  if (opt && M >= 2) {
    for (int t = 0; t + 2 <= M; t++) {
      auto dx = [&](int k) { return "(- " + xv(k + 1) + " " + xv(k) + ")"; };
      auto dy = [&](int k) { return "(- " + yv(k + 1) + " " + yv(k) + ")"; };
      b.assert_("(= " + tn(t) + " (ite (and (= " + dx(t) + " " + dx(t + 1) + ") (= " + dy(t) +
                " " + dy(t + 1) + ")) 1 0))");
    }
    std::string obj = M == 2 ? tn(0) : "(+";
    if (M > 2) {
      for (int t = 0; t + 2 <= M; t++) obj += " " + tn(t);
      obj += ")";
    }
    b.line("(maximize " + obj + ")");
  }

  b.line("(check-sat)");
  std::string gv = "(get-value (";
  for (int t = 0; t <= M; t++) gv += (t ? " " : "") + xv(t) + " " + yv(t) + " " + th(t);
  if (opt)
    for (int t = 0; t + 2 <= M; t++) gv += " " + tn(t);
  gv += "))";
  b.line(gv);

  SmtScript script;
  script.text = std::move(b.text);
  script.variable_names = std::move(b.names);
  script.stats = {b.asserts, static_cast<int>(script.variable_names.size())};
  script.kind = opt ? EncodingKind::KinematicOptimized : EncodingKind::Kinematic;
  return script;
}

}  // namespace gridnav
