#pragma once

#include <cstdlib>
#include <iomanip>

#include <json.hpp>

#include "controller.hpp"
#include "graph_planners.hpp"
#include "gridmap.hpp"
#include "plan.hpp"
#include "solver.hpp"

namespace gridnav {

using json = nlohmann::json;

struct Scenario {
  std::string name;
  std::string map_path;
  Pose init;
  Pose goal;
  int m_min = 1;
  int m_max = 8;
  double move_bound = 6.0;
  double inflation_radius = 0.2;
  double cell_size = 0.25;
  std::vector<std::string> planners = {"smt", "bfs", "astar"};
  std::string solver_command;  // empty: use the config default
  double timeout_s = 60.0;
  uint64_t seed = 0;
  std::optional<Workspace> workspace;  // default: map extent
  KinematicParams kin;
};

inline Pose pose_from_json(const json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3)
    throw std::invalid_argument("pose must be [x, y] or [x, y, theta]");
  Pose p{j[0].get<double>(), j[1].get<double>(), 0.0};
  if (j.size() == 3) p.theta = j[2].get<double>();
  return p;
}

// Reads a scenario description; relative map paths resolve against base_dir.
inline Scenario scenario_from_json(const json& j, const std::string& base_dir = ".") {
  Scenario s;
  s.name = j.at("name").get<std::string>();
  std::filesystem::path map(j.at("map").get<std::string>());
  if (map.is_relative()) map = std::filesystem::path(base_dir) / map;
  s.map_path = map.string();
  s.init = pose_from_json(j.at("init"));
  s.goal = pose_from_json(j.at("goal"));
  s.m_min = j.value("m_min", s.m_min);
  s.m_max = j.value("m_max", s.m_max);
  s.move_bound = j.value("move_bound", s.move_bound);
  s.inflation_radius = j.value("inflation_radius", s.inflation_radius);
  s.cell_size = j.value("cell_size", s.cell_size);
  if (j.contains("planners")) s.planners = j.at("planners").get<std::vector<std::string>>();
  s.timeout_s = j.value("timeout_s", s.timeout_s);
  s.seed = j.value("seed", s.seed);
  if (j.contains("solver")) {
    const json& sv = j.at("solver");
    s.solver_command = sv.value("command", std::string());
    s.timeout_s = sv.value("timeout_s", s.timeout_s);
  }
  if (j.contains("workspace")) {
    const json& w = j.at("workspace");
    s.workspace = Workspace{w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
                            w.at(3).get<double>()};
  }
  if (j.contains("kinematic")) {
    const json& k = j.at("kinematic");
    s.kin.v_x = k.value("v_x", s.kin.v_x);
    s.kin.v_y = k.value("v_y", s.kin.v_y);
    s.kin.goal_tolerance = k.value("goal_tolerance", s.kin.goal_tolerance);
    if (k.contains("rotations")) s.kin.rotations = k.at("rotations").get<std::vector<double>>();
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario: " + path);
  json j = json::parse(in);
  return scenario_from_json(j, std::filesystem::path(path).parent_path().string());
}

// Solver command priority: GRIDNAV_SOLVER env var, then the scenario's
// solver.command, then the built-in default.
inline SolverConfig resolve_solver_config(const Scenario& s) {
  SolverConfig cfg;
  cfg.timeout_s = s.timeout_s;
  if (!s.solver_command.empty()) cfg.command = s.solver_command;
  if (const char* env = std::getenv("GRIDNAV_SOLVER"); env && *env) cfg.command = env;
  return cfg;
}

inline json plan_to_json(const MotionPlan& plan) {
  json j;
  j["planner"] = planner_name(plan.planner);
  json wps = json::array();
  for (const Waypoint& w : plan.waypoints) {
    json wp = json::array({w.x, w.y});
    if (w.theta) wp.push_back(*w.theta);
    wps.push_back(wp);
  }
  j["waypoints"] = wps;
  j["solve_time_s"] = plan.solve_time_s;
  if (plan.encode_time_s > 0.0) j["encode_time_s"] = plan.encode_time_s;
  if (plan.smt_stats) {
    j["num_constraints"] = plan.smt_stats->num_constraints;
    j["num_variables"] = plan.smt_stats->num_variables;
  }
  if (plan.graph_stats) {
    j["nodes"] = plan.graph_stats->nodes;
    j["edges"] = plan.graph_stats->edges;
    j["expanded"] = plan.graph_stats->expanded;
  }
  return j;
}

inline MotionPlan plan_from_json(const json& j) {
  MotionPlan plan;
  std::string name = j.at("planner").get<std::string>();
  if (name == "smt") plan.planner = PlannerKind::Smt;
  else if (name == "smt-kin") plan.planner = PlannerKind::SmtKinematic;
  else if (name == "bfs") plan.planner = PlannerKind::Bfs;
  else if (name == "astar") plan.planner = PlannerKind::AStar;
  else throw std::invalid_argument("unknown planner name: " + name);
  for (const json& wp : j.at("waypoints")) {
    Waypoint w;
    w.x = wp.at(0).get<double>();
    w.y = wp.at(1).get<double>();
    if (wp.size() > 2) w.theta = wp.at(2).get<double>();
    plan.waypoints.push_back(w);
  }
  if (plan.waypoints.empty()) throw std::invalid_argument("plan has no waypoints");
  plan.solve_time_s = j.value("solve_time_s", 0.0);
  plan.encode_time_s = j.value("encode_time_s", 0.0);
  if (j.contains("num_constraints")) {
    EncodingStats st;
    st.num_constraints = j.at("num_constraints").get<int>();
    st.num_variables = j.value("num_variables", 0);
    plan.smt_stats = st;
  }
  if (j.contains("nodes")) {
    GraphStats gs;
    gs.nodes = j.at("nodes").get<long>();
    gs.edges = j.value("edges", 0L);
    gs.expanded = j.value("expanded", 0L);
    plan.graph_stats = gs;
  }
  return plan;
}

inline json pose_to_json(const Pose& p) { return json::array({p.x, p.y, p.theta}); }

inline json trajectory_to_json(const Trajectory& traj, const Pose& init) {
  json j;
  j["init"] = pose_to_json(init);
  j["final"] = pose_to_json(traj.final);
  json legs = json::array();
  for (const PrimitiveTrace& leg : traj.legs) {
    json steps = json::array();
    for (const TraceStep& st : leg.steps) {
      json step;
      step["primitive"] = primitive_name(st.primitive.kind);
      if (st.primitive.rotation_deg != 0.0) step["rotation_deg"] = st.primitive.rotation_deg;
      if (st.primitive.compensation) step["compensation"] = true;
      step["pose"] = pose_to_json(st.pose);
      steps.push_back(step);
    }
    legs.push_back(json{{"steps", steps}});
  }
  j["legs"] = legs;
  j["arrival_errors"] = traj.arrival_errors;
  return j;
}

struct PlannerOutcome {
  std::string planner;  // requested name, e.g. "smt-kin-opt"
  std::string status;   // "ok", "no-plan", or an error description
  std::optional<MotionPlan> plan;
  bool valid = false;
  std::vector<DeepeningAttempt> attempts;
};

struct ScenarioContext {
  OccupancyGrid grid;
  std::vector<ObstacleRect> raw_obstacles;
  std::vector<ObstacleRect> obstacles;  // inflated
  Workspace workspace;
  PlanningProblem problem;
};

inline ScenarioContext prepare_scenario(const Scenario& s) {
  ScenarioContext ctx;
  ctx.grid = load_map(s.map_path);
  ctx.workspace = s.workspace.value_or(ctx.grid.extent());
  ctx.raw_obstacles = extract_obstacles(ctx.grid);
  ctx.obstacles = inflate_obstacles(ctx.raw_obstacles, s.inflation_radius, ctx.workspace);
  ctx.problem.init = s.init;
  ctx.problem.goal = s.goal;
  ctx.problem.waypoint_budget = s.m_max;
  ctx.problem.move_bound = s.move_bound;
  ctx.problem.workspace = ctx.workspace;
  ctx.problem.obstacles = ctx.obstacles;
  return ctx;
}

inline PlannerOutcome run_planner(const std::string& name, const Scenario& s,
                                  const ScenarioContext& ctx) {
  PlannerOutcome out;
  out.planner = name;
  try {
    if (name == "smt" || name == "smt-kin" || name == "smt-kin-opt") {
      EncodingKind kind = name == "smt" ? EncodingKind::Pwl
                          : name == "smt-kin" ? EncodingKind::Kinematic
                                              : EncodingKind::KinematicOptimized;
      DeepeningOutcome deep =
          plan_with_deepening(ctx.problem, s.m_min, s.m_max, kind, s.kin, resolve_solver_config(s));
      out.attempts = deep.attempts;
      if (deep.plan) {
        out.plan = std::move(deep.plan);
        out.status = "ok";
      } else {
        out.status = "no-plan";
        if (!deep.attempts.empty() && deep.attempts.back().status == SolverStatus::Timeout)
          out.status = "timeout";
      }
    } else if (name == "bfs" || name == "astar") {
      auto t0 = std::chrono::steady_clock::now();
      CellGraph g = decompose(ctx.workspace, ctx.obstacles, s.cell_size);
      double decompose_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      GraphPlanResult res = name == "bfs" ? bfs_plan(g, s.init.position(), s.goal.position())
                                          : astar_plan(g, s.init.position(), s.goal.position());
      if (!res.error.empty()) {
        out.status = res.error;
      } else if (res.plan) {
        out.plan = std::move(res.plan);
        out.plan->encode_time_s = decompose_s;
        out.status = "ok";
      } else {
        out.status = "no-plan";
      }
    } else {
      out.status = "unknown planner: " + name;
    }
  } catch (const std::exception& e) {
    out.status = std::string("error: ") + e.what();
  }
  if (out.plan) {
    out.valid = validate_plan(*out.plan, ctx.obstacles).ok;
    if (!out.valid) out.status = "invalid-plan";
  }
  return out;
}

struct Report {
  std::string scenario;
  std::vector<PlannerOutcome> rows;
};

inline Report run_scenario(const Scenario& s) {
  ScenarioContext ctx = prepare_scenario(s);
  Report rep;
  rep.scenario = s.name;
  for (const std::string& p : s.planners) rep.rows.push_back(run_planner(p, s, ctx));
  return rep;
}

enum class TableFormat { Markdown, Csv };

namespace detail {

inline std::string fmt_fixed(double v, int prec) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(prec) << v;
  return ss.str();
}

inline std::string sanitize_cell(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '|' || c == '\n') c = ';';
  }
  return s;
}

}  // namespace detail

// One row per (scenario, planner). Missing values render as "-"; columns
// constraints/variables apply to SMT rows, nodes/edges to graph rows.
inline std::string emit_table(const std::vector<Report>& reports, TableFormat fmt) {
  const std::vector<std::string> header = {"scenario", "planner",  "constraints", "variables",
                                           "nodes",    "edges",    "encode_s",    "solve_s",
                                           "waypoints", "path_length", "valid"};
  std::vector<std::vector<std::string>> rows;
  for (const Report& rep : reports) {
    for (const PlannerOutcome& row : rep.rows) {
      std::vector<std::string> cells(header.size(), "-");
      cells[0] = detail::sanitize_cell(rep.scenario);
      cells[1] = row.planner;
      if (row.plan) {
        const MotionPlan& p = *row.plan;
        if (p.smt_stats) {
          cells[2] = std::to_string(p.smt_stats->num_constraints);
          cells[3] = std::to_string(p.smt_stats->num_variables);
        }
        if (p.graph_stats) {
          cells[4] = std::to_string(p.graph_stats->nodes);
          cells[5] = std::to_string(p.graph_stats->edges);
        }
        cells[6] = detail::fmt_fixed(p.encode_time_s, 3);
        cells[7] = detail::fmt_fixed(p.solve_time_s, 3);
        cells[8] = std::to_string(p.waypoints.size());
        cells[9] = detail::fmt_fixed(path_length(p.waypoints), 3);
        cells[10] = row.valid ? "yes" : "no";
      } else {
        cells[10] = detail::sanitize_cell(row.status);
      }
      rows.push_back(std::move(cells));
    }
  }

  std::string out;
  if (fmt == TableFormat::Csv) {
    for (size_t i = 0; i < header.size(); i++) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); i++) out += (i ? "," : "") + r[i];
      out += '\n';
    }
  } else {
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s = "|";
      for (const std::string& c : cells) s += " " + c + " |";
      return s + "\n";
    };
    out += line(header);
    std::vector<std::string> sep(header.size(), "---");
    out += line(sep);
    for (const auto& r : rows) out += line(r);
  }
  return out;
}

namespace detail {

inline const char* plan_color(const std::string& label) {
  if (label == "smt") return "blue";
  if (label == "smt-kin") return "purple";
  if (label == "smt-kin-opt") return "teal";
  if (label == "astar") return "red";
  if (label == "bfs") return "orange";
  return "black";
}

}  // namespace detail

// Deterministic SVG: white free space, grey unknown cells, black obstacles,
// one polyline per plan (smt blue, astar red), green goal box, black start
// dot. Pure function of its inputs.
inline std::string render_svg(const OccupancyGrid& grid,
                              const std::vector<ObstacleRect>& obstacles,
                              const std::vector<std::pair<std::string, const MotionPlan*>>& plans,
                              const Point& init, const Point& goal) {
  const Workspace ws = grid.extent();
  const double scale = 640.0 / std::max(ws.width(), ws.height());
  const double W = ws.width() * scale, H = ws.height() * scale;
  auto X = [&](double x) { return (x - ws.x_min) * scale; };
  auto Y = [&](double y) { return (ws.y_max - y) * scale; };
  auto num = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" fill=\"white\"/>\n";

  // unknown cells, merged into horizontal runs
  for (int row = 0; row < grid.height; row++) {
    int col = 0;
    while (col < grid.width) {
      if (grid.at(col, row) != Cell::Unknown) {
        col++;
        continue;
      }
      int start = col;
      while (col < grid.width && grid.at(col, row) == Cell::Unknown) col++;
      double x0 = grid.origin_x + start * grid.resolution;
      double x1 = grid.origin_x + col * grid.resolution;
      double y0 = grid.origin_y + row * grid.resolution;
      double y1 = y0 + grid.resolution;
      svg += "<rect x=\"" + num(X(x0)) + "\" y=\"" + num(Y(y1)) + "\" width=\"" +
             num((x1 - x0) * scale) + "\" height=\"" + num((y1 - y0) * scale) +
             "\" fill=\"grey\"/>\n";
    }
  }

  for (const ObstacleRect& r : obstacles) {
    svg += "<rect x=\"" + num(X(r.x_bl)) + "\" y=\"" + num(Y(r.y_tr)) + "\" width=\"" +
           num(r.width() * scale) + "\" height=\"" + num(r.height() * scale) +
           "\" fill=\"black\"/>\n";
  }

  for (const auto& [label, plan] : plans) {
    if (!plan || plan->waypoints.empty()) continue;
    std::string pts;
    for (const Waypoint& w : plan->waypoints) {
      if (!pts.empty()) pts += " ";
      pts += num(X(w.x)) + "," + num(Y(w.y));
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           detail::plan_color(label) + "\" stroke-width=\"2\"/>\n";
  }

  double gb = 0.3 * scale;
  svg += "<rect x=\"" + num(X(goal.x) - gb) + "\" y=\"" + num(Y(goal.y) - gb) + "\" width=\"" +
         num(2 * gb) + "\" height=\"" + num(2 * gb) +
         "\" fill=\"green\" fill-opacity=\"0.5\" stroke=\"green\"/>\n";
  svg += "<circle cx=\"" + num(X(init.x)) + "\" cy=\"" + num(Y(init.y)) +
         "\" r=\"4\" fill=\"black\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace gridnav
