#include <catch2/catch_amalgamated.hpp>

#include <gridnav/solver.hpp>

#include "helpers.hpp"

using namespace gridnav;

namespace {

SmtScript script_of(const std::string& text) {
  SmtScript s;
  s.text = text;
  return s;
}

PlanningProblem detour_problem() {
  PlanningProblem p;
  p.init = {1.0, 1.0, 0.0};
  p.goal = {9.0, 9.0, 0.0};
  p.move_bound = 6.0;
  p.workspace = {0.0, 0.0, 10.0, 10.0};
  p.obstacles = {{4.0, 4.0, 6.0, 6.0}};
  return p;
}

}  // namespace

TEST_CASE("parse_model_values handles z3 value forms") {
  auto m = parse_model_values("((x_1 (/ 13 2)))");
  CHECK(m.at("x_1") == 6.5);

  m = parse_model_values("((a 1.5) (b (- 2.0)) (n 42))");
  CHECK(m.at("a") == 1.5);
  CHECK(m.at("b") == -2.0);
  CHECK(m.at("n") == 42.0);

  // truncated-decimal marker
  m = parse_model_values("((v 0.333333333333?))");
  CHECK(m.at("v") == Catch::Approx(1.0 / 3.0).margin(1e-9));

  m = parse_model_values("((w (- (/ 1 3))))");
  CHECK(m.at("w") == Catch::Approx(-1.0 / 3.0));

  m = parse_model_values("((q (/ 123456789123456789 4)))");
  CHECK(m.at("q") == Catch::Approx(123456789123456789.0 / 4.0));

  SECTION("groups split across lines") {
    m = parse_model_values("((x 1.0)\n (y 2.0))\n((z 3.0))\n");
    CHECK(m.size() == 3);
    CHECK(m.at("z") == 3.0);
  }

  SECTION("empty input gives an empty model") { CHECK(parse_model_values("").empty()); }

  SECTION("malformed input throws") {
    CHECK_THROWS_AS(parse_model_values("((x abc))"), SolverFailure);
    CHECK_THROWS_AS(parse_model_values("((x"), SolverFailure);
    CHECK_THROWS_AS(parse_model_values("((x (% 1 2)))"), SolverFailure);
  }
}

TEST_CASE("run_solver classifies stub solver output") {
  SmtScript s = script_of("(check-sat)\n");

  SECTION("sat with a model") {
    SolverResult r = run_solver(s, {"sh -c 'echo sat; echo \"((x_0 1.0) (y_0 (/ 1 2)))\"'", 10.0});
    REQUIRE(r.status == SolverStatus::Sat);
    REQUIRE(r.model.has_value());
    CHECK(r.model->at("x_0") == 1.0);
    CHECK(r.model->at("y_0") == 0.5);
  }

  SECTION("unsat and unknown") {
    CHECK(run_solver(s, {"sh -c 'echo unsat'", 10.0}).status == SolverStatus::Unsat);
    CHECK(run_solver(s, {"sh -c 'echo unknown'", 10.0}).status == SolverStatus::Unknown);
  }

  SECTION("status must be a whole line") {
    CHECK(run_solver(s, {"sh -c 'echo satisfiable'", 10.0}).status == SolverStatus::SolverError);
  }

  SECTION("noise before the status line is skipped") {
    SolverResult r = run_solver(s, {"sh -c 'echo warning: foo >&2; echo unsat'", 10.0});
    CHECK(r.status == SolverStatus::Unsat);
    CHECK(r.raw_output.find("warning") != std::string::npos);
  }

  SECTION("carriage returns are tolerated") {
    SolverResult r = run_solver(s, {"sh -c 'printf \"sat\\r\\n((x 1.0))\\n\"'", 10.0});
    REQUIRE(r.status == SolverStatus::Sat);
    CHECK(r.model->at("x") == 1.0);
  }

  SECTION("missing binary reports SolverError") {
    SolverResult r = run_solver(s, {"/no/such/solver-binary", 10.0});
    CHECK(r.status == SolverStatus::SolverError);
    CHECK(r.raw_output.find("command not found") != std::string::npos);
  }

  SECTION("wall-clock timeout kills the process") {
    SolverResult r = run_solver(s, {"sh -c 'sleep 5'", 0.3});
    CHECK(r.status == SolverStatus::Timeout);
    CHECK(r.wall_time_s >= 0.3);
    CHECK(r.wall_time_s < 3.0);
  }
}

TEST_CASE("run_solver round-trips a trivial script through z3") {
  SmtScript s = script_of(
      "(set-option :pp.decimal true)\n"
      "(set-logic QF_LRA)\n"
      "(declare-const x Real)\n"
      "(assert (= x (/ 13 2)))\n"
      "(check-sat)\n"
      "(get-value (x))\n");
  SolverResult r = run_solver(s, SolverConfig{});
  REQUIRE(r.status == SolverStatus::Sat);
  REQUIRE(r.model.has_value());
  CHECK(r.model->at("x") == Catch::Approx(6.5).margin(1e-9));
}

TEST_CASE("decode_plan extracts waypoints and collapses stays") {
  SolverResult r;
  r.status = SolverStatus::Sat;
  r.model = std::map<std::string, double>{{"x_0", 1.0}, {"y_0", 1.0}, {"x_1", 1.0},
                                          {"y_1", 1.0}, {"x_2", 5.0}, {"y_2", 5.0}};
  MotionPlan plan = decode_plan(r, 2, false);
  REQUIRE(plan.waypoints.size() == 2);
  CHECK(plan.waypoints[0].x == 1.0);
  CHECK(plan.waypoints[1].y == 5.0);
  CHECK(plan.planner == PlannerKind::Smt);
  CHECK_FALSE(plan.waypoints[0].theta.has_value());

  SECTION("kinematic keeps theta and treats heading changes as moves") {
    r.model = std::map<std::string, double>{{"x_0", 1.0}, {"y_0", 1.0}, {"theta_0", 0.0},
                                            {"x_1", 1.0}, {"y_1", 1.0}, {"theta_1", 6.0}};
    MotionPlan kin = decode_plan(r, 1, true);
    REQUIRE(kin.waypoints.size() == 2);
    CHECK(kin.waypoints[1].theta == Catch::Approx(6.0));
    CHECK(kin.planner == PlannerKind::SmtKinematic);
  }

  SECTION("requires sat with a model") {
    SolverResult bad;
    bad.status = SolverStatus::Unsat;
    CHECK_THROWS_AS(decode_plan(bad, 1, false), SolverFailure);
    bad.status = SolverStatus::Sat;
    CHECK_THROWS_AS(decode_plan(bad, 1, false), SolverFailure);
  }

  SECTION("missing variable throws") {
    r.model = std::map<std::string, double>{{"x_0", 1.0}};
    CHECK_THROWS_AS(decode_plan(r, 1, false), SolverFailure);
  }
}

TEST_CASE("plan_with_deepening finds the smallest sat budget") {
  PlanningProblem p = detour_problem();
  // M=1 cannot work: a direct hop needs |dx| = 8 >= move bound
  DeepeningOutcome out =
      plan_with_deepening(p, 1, 3, EncodingKind::Pwl, KinematicParams{}, SolverConfig{});
  REQUIRE(out.plan.has_value());
  REQUIRE(out.attempts.size() == 2);
  CHECK(out.attempts[0].waypoint_budget == 1);
  CHECK(out.attempts[0].status == SolverStatus::Unsat);
  CHECK(out.attempts[1].waypoint_budget == 2);
  CHECK(out.attempts[1].status == SolverStatus::Sat);

  const MotionPlan& plan = *out.plan;
  REQUIRE(plan.waypoints.size() == 3);
  CHECK(plan.waypoints.front().x == Catch::Approx(1.0).margin(1e-9));
  CHECK(plan.waypoints.front().y == Catch::Approx(1.0).margin(1e-9));
  CHECK(plan.waypoints.back().x == Catch::Approx(9.0).margin(1e-9));
  CHECK(plan.waypoints.back().y == Catch::Approx(9.0).margin(1e-9));
  REQUIRE(plan.smt_stats.has_value());
  CHECK(plan.smt_stats->num_variables == 12);
  CHECK(plan.encode_time_s > 0.0);
  CHECK(plan.solve_time_s > 0.0);
  CHECK(plan.solve_time_s == Catch::Approx(out.total_solve_s()));

  // the decoded plan clears the obstacle by the independent geometric check
  ValidationReport rep = validate_plan(plan, p.obstacles);
  CHECK(rep.ok);
}

TEST_CASE("plan_with_deepening reports all-unsat searches") {
  PlanningProblem p = detour_problem();
  p.obstacles = {{4.0, 0.0, 6.0, 10.0}};  // full-height wall
  p.goal = {9.0, 1.0, 0.0};
  DeepeningOutcome out =
      plan_with_deepening(p, 1, 2, EncodingKind::Pwl, KinematicParams{}, SolverConfig{});
  CHECK_FALSE(out.plan.has_value());
  REQUIRE(out.attempts.size() == 2);
  CHECK(out.attempts[0].status == SolverStatus::Unsat);
  CHECK(out.attempts[1].status == SolverStatus::Unsat);
}

TEST_CASE("plan_with_deepening validates its range and surfaces solver errors") {
  PlanningProblem p = detour_problem();
  CHECK_THROWS_AS(
      plan_with_deepening(p, 0, 2, EncodingKind::Pwl, KinematicParams{}, SolverConfig{}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      plan_with_deepening(p, 3, 2, EncodingKind::Pwl, KinematicParams{}, SolverConfig{}),
      std::invalid_argument);
  CHECK_THROWS_AS(plan_with_deepening(p, 1, 1, EncodingKind::Pwl, KinematicParams{},
                                      {"/no/such/solver-binary", 10.0}),
                  SolverFailure);
}
