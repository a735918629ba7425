// Command-line front end: plan one scenario, benchmark a directory of
// scenarios, or simulate plan execution with the line-of-sight controller.
#include <iostream>

#include <CLI11.hpp>

#include <gridnav/gridnav.hpp>

namespace {

using namespace gridnav;

int cmd_plan(const std::string& map_path, const std::string& scenario_path,
             const std::string& planner, const std::string& out_path, const std::string& svg_path,
             const std::string& obstacles_path) {
  Scenario scenario = load_scenario(scenario_path);
  if (!map_path.empty()) scenario.map_path = map_path;
  scenario.planners = {planner};

  ScenarioContext ctx = prepare_scenario(scenario);
  PlannerOutcome outcome = run_planner(planner, scenario, ctx);

  if (!obstacles_path.empty()) {
    json arr = json::array();
    for (const ObstacleRect& r : ctx.obstacles)
      arr.push_back({{"x_bl", r.x_bl}, {"y_bl", r.y_bl}, {"x_tr", r.x_tr}, {"y_tr", r.y_tr}});
    std::ofstream(obstacles_path) << arr.dump(2) << "\n";
  }

  if (!outcome.plan) {
    bool hard_error = outcome.status != "no-plan" && outcome.status != "timeout";
    std::cerr << "no plan: " << outcome.status << "\n";
    return hard_error ? 2 : 1;
  }
  if (!outcome.valid) {
    std::cerr << "planner produced an invalid plan\n";
    return 2;
  }

  std::ofstream(out_path) << plan_to_json(*outcome.plan).dump(2) << "\n";
  if (!svg_path.empty()) {
    std::ofstream(svg_path) << render_svg(ctx.grid, ctx.obstacles,
                                          {{planner, &*outcome.plan}},
                                          scenario.init.position(), scenario.goal.position());
  }
  std::cout << emit_table({Report{scenario.name, {outcome}}}, TableFormat::Markdown);
  return 0;
}

int cmd_bench(const std::string& dir, const std::string& format, const std::string& out_path) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no scenario files in " << dir << "\n";
    return 2;
  }
  std::vector<Report> reports;
  for (const auto& f : files) {
    Scenario s = load_scenario(f.string());
    std::cerr << "running " << s.name << "...\n";
    reports.push_back(run_scenario(s));
  }
  std::string table =
      emit_table(reports, format == "csv" ? TableFormat::Csv : TableFormat::Markdown);
  if (out_path.empty()) std::cout << table;
  else std::ofstream(out_path) << table;
  return 0;
}

int cmd_simulate(const std::string& plan_path, const std::string& init_str,
                 const std::string& noise_str, uint64_t seed, const std::string& trace_path,
                 double step_length, double deadband, double backstep, bool calibrated) {
  std::ifstream in(plan_path);
  if (!in) {
    std::cerr << "cannot open plan: " << plan_path << "\n";
    return 2;
  }
  MotionPlan plan = plan_from_json(json::parse(in));

  auto parse_triple = [](const std::string& s, const char* what, size_t want) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    if (vals.size() != want)
      throw std::invalid_argument(std::string(what) + " needs " + std::to_string(want) +
                                  " comma-separated numbers");
    return vals;
  };

  auto iv = parse_triple(init_str, "--init", 3);
  Pose init{iv[0], iv[1], iv[2]};

  ControllerParams params;
  params.step_length = step_length;
  params.angle_deadband = deadband;
  params.backstep_distance = backstep;
  params.calibrated = calibrated;

  NoiseModel noise;
  std::mt19937_64 rng(seed);
  bool noisy = !noise_str.empty();
  if (noisy) {
    auto nv = parse_triple(noise_str, "--noise", 2);
    noise.sigma_pos = nv[0];
    noise.sigma_ang = nv[1];
  }

  Trajectory traj = execute_plan(plan, init, params, noisy ? &noise : nullptr,
                                 noisy ? &rng : nullptr);
  json j = trajectory_to_json(traj, init);
  if (noisy) {
    j["noise"] = {{"sigma_pos", noise.sigma_pos}, {"sigma_ang", noise.sigma_ang}};
    j["seed"] = seed;
  }
  std::ofstream(trace_path) << j.dump(2) << "\n";

  double worst = 0.0;
  for (double e : traj.arrival_errors) worst = std::max(worst, e);
  std::cout << "followed " << plan.waypoints.size() << " waypoints, worst arrival error "
            << worst << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occupancy-grid motion planning via SMT, graph search, and simulation"};
  app.require_subcommand(1);

  std::string map_path, scenario_path, planner = "smt", out_path = "plan.json", svg_path,
              obstacles_path;
  CLI::App* plan = app.add_subcommand("plan", "plan a single scenario");
  plan->add_option("--map", map_path, "map YAML (overrides the scenario's map)");
  plan->add_option("--scenario", scenario_path, "scenario JSON")->required();
  plan->add_option("--planner", planner, "smt | smt-kin | smt-kin-opt | bfs | astar");
  plan->add_option("--out", out_path, "output plan JSON path");
  plan->add_option("--svg", svg_path, "also render the environment and plan");
  plan->add_option("--obstacles", obstacles_path, "dump extracted inflated obstacles as JSON");

  std::string bench_dir, table_format = "md", bench_out;
  CLI::App* bench = app.add_subcommand("bench", "run every scenario in a directory");
  bench->add_option("--scenarios", bench_dir, "directory of scenario JSON files")->required();
  bench->add_option("--table", table_format, "md | csv")
      ->check(CLI::IsMember({"md", "csv"}));
  bench->add_option("--out", bench_out, "write the table here instead of stdout");

  std::string plan_path, init_str, noise_str, trace_path = "trace.json";
  uint64_t seed = 0;
  double step_length = 6.46, deadband = 1.5, backstep = 0.0;
  bool calibrated = false;
  CLI::App* sim = app.add_subcommand("simulate", "execute a plan with the LoS controller");
  sim->add_option("--plan", plan_path, "plan JSON")->required();
  sim->add_option("--init", init_str, "initial pose x,y,theta")->required();
  sim->add_option("--noise", noise_str, "sigma_pos,sigma_ang");
  sim->add_option("--seed", seed, "noise RNG seed");
  sim->add_option("--trace", trace_path, "output trace JSON path");
  sim->add_option("--step-length", step_length, "forward step distance");
  sim->add_option("--deadband", deadband, "rotation deadband, degrees");
  sim->add_option("--backstep", backstep, "compensation distance after rotations");
  sim->add_flag("--calibrated", calibrated, "use measured effective rotations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed())
      return cmd_plan(map_path, scenario_path, planner, out_path, svg_path, obstacles_path);
    if (bench->parsed()) return cmd_bench(bench_dir, table_format, bench_out);
    if (sim->parsed())
      return cmd_simulate(plan_path, init_str, noise_str, seed, trace_path, step_length, deadband,
                          backstep, calibrated);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
