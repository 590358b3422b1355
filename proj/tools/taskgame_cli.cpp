// Command-line harness: single simulations, Monte Carlo batches, and the
// small-instance verification suite.

#include "taskgame/engine.hpp"
#include "taskgame/harness.hpp"

#include "checks/checks.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace taskgame;

namespace {

struct SimulateOptions {
  std::string mode = "dta";
  std::string protocol = "grm";
  int agents = 10;
  int tasks = 10;
  double tf = 10.0;
  double dt = 0.0;
  std::string range = "inf";
  double epsilon = 0.0;
  int rounds = 0;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string scenario;
};

int run_simulate(const SimulateOptions& o) {
  const Mode mode = parse_mode(o.mode);
  const Protocol protocol = parse_protocol(o.protocol);

  Scenario scenario = o.scenario.empty()
                          ? generate_scenario(o.agents, o.tasks, o.tf, parse_range(o.range), o.seed)
                          : load_scenario(o.scenario);
  EngineConfig config = default_config(mode, protocol, scenario.final_time, o.seed);
  if (o.dt > 0.0) config.dt = o.dt;
  if (o.epsilon > 0.0) config.epsilon = o.epsilon;
  if (o.rounds > 0) config.olta_rounds = o.rounds;

  const SimulationTrace trace = simulate(scenario, config);

  fs::create_directories(o.out);
  save_scenario(scenario, fs::path(o.out) / "scenario.json");
  dump_trace(trace, fs::path(o.out) / "trace.csv");

  BatchResult result;
  ResultRow row;
  row.cell = {mode, protocol, scenario.final_time, scenario.range};
  row.run_seed = o.seed;
  row.team_utility = trace.final_team_utility;
  row.converged = trace.converged;
  result.rows.push_back(row);
  write_results_csv(result, fs::path(o.out) / "results.csv");

  std::cout << "team_utility " << trace.final_team_utility << " converged " << trace.converged
            << '\n';
  return EXIT_SUCCESS;
}

int run_batch_command(const std::string& spec_path, const std::string& out) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot read " + spec_path);
  BatchSpec spec = batch_spec_from_json(nlohmann::json::parse(in));
  if (!out.empty()) spec.output_dir = out;
  if (spec.output_dir.empty()) throw std::invalid_argument("batch: --out is required");

  const BatchResult result = run_batch(spec);
  for (const auto& s : result.summary) {
    std::cout << to_string(s.cell.mode) << ' ' << to_string(s.cell.protocol) << " tf="
              << s.cell.final_time << " range=" << format_range(s.cell.range) << " mean="
              << s.mean_team_utility << " converged=" << s.converged_fraction << '\n';
  }
  return EXIT_SUCCESS;
}

int run_verify() {
  bool ok = true;
  for (const auto& r : checks::run_small_suite()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " : " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game-theoretic dynamic task allocation"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one OLTA or DTA simulation");
  simulate_cmd->add_option("--mode", sim.mode, "olta | dta")->check(CLI::IsMember({"olta", "dta"}));
  simulate_cmd->add_option("--protocol", sim.protocol, "grm | sap | br")
      ->check(CLI::IsMember({"grm", "sap", "br"}));
  simulate_cmd->add_option("--agents", sim.agents, "Number of agents")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--tasks", sim.tasks, "Number of tasks")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--tf", sim.tf, "Final time")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--dt", sim.dt, "Stage length (default per protocol)");
  simulate_cmd->add_option("--range", sim.range, "Assignment range or 'inf'");
  simulate_cmd->add_option("--epsilon", sim.epsilon, "Freeze window length (default tf/20)");
  simulate_cmd->add_option("--rounds", sim.rounds, "OLTA negotiation rounds (default per protocol)");
  simulate_cmd->add_option("--seed", sim.seed, "Random seed");
  simulate_cmd->add_option("--out", sim.out, "Output directory");
  simulate_cmd->add_option("--scenario", sim.scenario, "Scenario JSON file")->check(CLI::ExistingFile);

  std::string spec_path;
  std::string batch_out;
  auto* batch_cmd = app.add_subcommand("batch", "Run a Monte Carlo batch");
  batch_cmd->add_option("--spec", spec_path, "Batch spec JSON")->required()->check(CLI::ExistingFile);
  batch_cmd->add_option("--out", batch_out, "Output directory")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Run the property and oracle checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) return run_simulate(sim);
    if (*batch_cmd) return run_batch_command(spec_path, batch_out);
    if (*verify_cmd) return run_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
