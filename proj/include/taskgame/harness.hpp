#pragma once

#include "taskgame/core.hpp"
#include "taskgame/engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace taskgame {

/// Random instance: positions, targets, rewards and success probabilities
/// uniform on [0,1] (per coordinate), initial velocities uniform on
/// [-0.1,0.1]^2. Deterministic in seed; independent of final_time and range.
Scenario generate_scenario(int num_agents, int num_tasks, double final_time,
                           std::optional<double> range, std::uint64_t seed);

// Scenario files: {"agents":[{"p0":[x,y],"v0":[x,y]}...],
//                  "tasks":[{"pos":[x,y],"reward":r,"probs":[...]}...],
//                  "tf":T, "range":R | "inf"}
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

std::string format_range(const std::optional<double>& range);
std::optional<double> parse_range(const std::string& text);

struct BatchSpec {
  int num_agents = 100;
  int num_tasks = 100;
  std::vector<double> final_times{2.0, 5.0, 10.0};
  std::vector<Protocol> protocols{Protocol::GRM, Protocol::SAP};
  std::vector<std::optional<double>> ranges{std::nullopt};
  std::vector<Mode> modes{Mode::OLTA, Mode::DTA};
  int runs = 100;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir;
  unsigned threads = 0;  // 0: hardware concurrency
};

BatchSpec batch_spec_from_json(const nlohmann::json& doc);
void validate(const BatchSpec& spec);

struct Cell {
  Mode mode;
  Protocol protocol;
  double final_time;
  std::optional<double> range;
};

struct ResultRow {
  Cell cell;
  int run = 0;
  std::uint64_t run_seed = 0;
  double team_utility = 0.0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
};

struct CellSummary {
  Cell cell;
  int runs = 0;
  double mean_team_utility = 0.0;
  double converged_fraction = 0.0;
};

struct BatchResult {
  std::vector<ResultRow> rows;  // ordered by (cell, run)
  std::vector<CellSummary> summary;
};

/// Cells in output order: final time, protocol, mode, range (outer to inner).
std::vector<Cell> expand_cells(const BatchSpec& spec);

/// Executes one run of one cell. The scenario depends only on the run seed,
/// so every cell with the same run index sees the same instance.
ResultRow run_cell(const BatchSpec& spec, const Cell& cell, int run);

/// Runs every (cell, run) pair. When spec.output_dir is set, rows are
/// appended to progress.csv as they finish, and results.csv / summary.csv
/// are written once all runs complete. Those two files exclude wall times,
/// so they are byte-identical across reruns.
BatchResult run_batch(const BatchSpec& spec);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

void write_results_csv(const BatchResult& result, const std::filesystem::path& path);
void write_summary_csv(const BatchResult& result, const std::filesystem::path& path);

/// One line per (stage, agent): time agent_id px py vx vy assignment team_utility.
/// The assignment column holds the task id, or -1 for null.
void dump_trace(const SimulationTrace& trace, const std::filesystem::path& path);

}  // namespace taskgame
