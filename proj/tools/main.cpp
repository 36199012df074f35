// Command-line front end: simulation runs, certification checks, centralized
// reference solves and the built-in demo instance.

#include "rra/certify.hpp"
#include "rra/dynamics.hpp"
#include "rra/io.hpp"
#include "rra/oracle.hpp"
#include "rra/problem.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

namespace fs = std::filesystem;

rra::RobustAllocationProblem load_problem_arg(const std::string& spec) {
  if (spec == "builtin:paper-demo" || spec == "builtin:demo") {
    return rra::demo_problem();
  }
  std::ifstream in(spec);
  if (!in) throw rra::ParseError("cannot open problem file: " + spec);
  std::ostringstream buf;
  buf << in.rdbuf();
  return rra::load_problem(buf.str());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& problem_spec, double dt, double t_end,
            int record_every, double early_stop_tol, const std::string& out_dir,
            bool dump_state) {
  auto problem = load_problem_arg(problem_spec);
  const auto validation = rra::validate_problem(problem);
  if (!validation.passed()) {
    std::cerr << "problem validation failed:\n" << validation.str();
    return 2;
  }
  for (const auto& f : validation.findings) {
    if (f.severity == rra::ValidationFinding::Severity::Warning) {
      std::cerr << "warning [" << f.code << "] " << f.message << "\n";
    }
  }

  rra::IntegratorConfig config;
  config.dt = dt;
  config.t_end = t_end;
  config.record_every = record_every;
  if (early_stop_tol > 0) config.early_stop_tol = early_stop_tol;

  const auto t0 = std::chrono::steady_clock::now();
  rra::Trajectory traj;
  try {
    traj = rra::simulate(problem, rra::default_init(problem), config);
  } catch (const rra::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  // Lyapunov monitor against the final state (no oracle reference here).
  rra::lyapunov_series(problem, traj, traj.final_state(), true);

  const fs::path out(out_dir);
  fs::create_directories(out);
  {
    std::ofstream csv(out / "trajectory.csv");
    rra::write_trajectory_csv(csv, problem.dims(), traj);
  }
  if (dump_state) {
    write_file(out / "final_state.json",
               rra::state_to_json(problem.dims(), traj.final_state()).dump(2) +
                   "\n");
  }

  const auto laplacian = rra::build_laplacian(problem.graph);
  const auto report = rra::certify_state(problem, laplacian, traj.final_state());
  nlohmann::ordered_json summary;
  summary["format_version"] = rra::kFormatVersion;
  summary["dt"] = dt;
  summary["t_end"] = traj.times.back();
  summary["steps"] = static_cast<long>(std::lround(traj.times.back() / dt));
  summary["wall_time_s"] = wall;
  nlohmann::ordered_json fx = nlohmann::ordered_json::array();
  const auto d = problem.dims();
  for (int i = 0; i < d.n; ++i) {
    nlohmann::ordered_json xi = nlohmann::ordered_json::array();
    for (int l = 0; l < d.q; ++l) xi.push_back(traj.final_state().x[d.xidx(i, l)]);
    fx.push_back(std::move(xi));
  }
  summary["final_x"] = std::move(fx);
  summary["residuals"] = rra::report_to_json(report);
  summary["lyapunov_reference"] = "final-state";
  write_file(out / "summary.json", summary.dump(2) + "\n");

  std::cout << "run complete: t_end = " << traj.times.back()
            << ", wall = " << wall << " s\n"
            << rra::report_table(report);
  return 0;
}

int cmd_check(const std::string& state_path, const std::string& problem_spec,
              double tol) {
  auto problem = load_problem_arg(problem_spec);
  std::ifstream in(state_path);
  if (!in) {
    std::cerr << "cannot open state file: " << state_path << "\n";
    return 2;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "state JSON: " << e.what() << "\n";
    return 2;
  }
  const auto state = rra::state_from_json(problem, j);
  const auto laplacian = rra::build_laplacian(problem.graph);
  const auto report = rra::certify_state(problem, laplacian, state);
  std::cout << rra::report_to_json(report).dump(2) << "\n"
            << rra::report_table(report);
  const bool ok = report.kkt.max() <= tol;
  std::cout << (ok ? "check: PASS" : "check: FAIL") << " (tol " << tol << ")\n";
  return ok ? 0 : 1;
}

int cmd_oracle(const std::string& problem_spec, double tol, long max_iter,
               const std::string& out_path) {
  auto problem = load_problem_arg(problem_spec);
  rra::OracleSolution sol;
  try {
    sol = rra::centralized_solve(problem, tol, max_iter);
  } catch (const rra::OracleFailure& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  const auto j = rra::oracle_to_json(problem.dims(), sol);
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_file(out_path, j.dump(2) + "\n");
    std::cout << "oracle solution written to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Distributed robust resource allocation under budget uncertainty: "
      "multi-agent flow simulator, optimality certification and a "
      "centralized reference solver"};
  app.require_subcommand(1);

  std::string problem_spec = "builtin:paper-demo";
  double dt = 0.01, t_end = 300.0, early_stop_tol = 0.0, tol = 1e-2;
  int record_every = 10;
  long max_iter = 200000;
  std::string out_dir = "out", state_path, out_path;
  bool dump_state = false;

  auto* run = app.add_subcommand("run", "integrate the multi-agent flow");
  run->add_option("--problem", problem_spec,
                  "problem JSON path or builtin:paper-demo");
  run->add_option("--dt", dt, "step size")->check(CLI::PositiveNumber);
  run->add_option("--t-end", t_end, "horizon")->check(CLI::PositiveNumber);
  run->add_option("--record-every", record_every, "snapshot stride in steps")
      ->check(CLI::PositiveNumber);
  run->add_option("--early-stop-tol", early_stop_tol,
                  "stop when the equilibrium residual drops below this");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--dump-state", dump_state, "also write final_state.json");

  auto* check = app.add_subcommand("check", "certify a state dump");
  check->add_option("state", state_path, "state JSON path")->required();
  check->add_option("--problem", problem_spec,
                    "problem JSON path or builtin:paper-demo");
  check->add_option("--tol", tol, "pass/fail tolerance on the KKT residuals");

  auto* oracle = app.add_subcommand("oracle", "centralized reference solve");
  oracle->add_option("--problem", problem_spec,
                     "problem JSON path or builtin:paper-demo");
  oracle->add_option("--tol", tol, "required KKT tolerance")
      ->default_val(1e-4);
  oracle->add_option("--max-iter", max_iter, "subgradient iteration budget");
  oracle->add_option("--out", out_path, "write the solution JSON here");

  auto* dump = app.add_subcommand("dump-demo", "print the builtin demo problem");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(problem_spec, dt, t_end, record_every, early_stop_tol,
                     out_dir, dump_state);
    }
    if (check->parsed()) return cmd_check(state_path, problem_spec, tol);
    if (oracle->parsed()) return cmd_oracle(problem_spec, tol, max_iter, out_path);
    if (dump->parsed()) {
      std::cout << rra::dump_problem(rra::demo_problem());
      return 0;
    }
  } catch (const rra::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
