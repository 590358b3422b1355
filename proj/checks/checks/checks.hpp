#pragma once

// Property and oracle checks shared by the `verify` command and the
// acceptance suite. Each returns a pass/fail verdict with a one-line detail.

#include "taskgame/core.hpp"
#include "taskgame/harness.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace taskgame::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Random instance with n <= 5 agents, p <= 4 tasks, states drawn from the
/// standard boxes, final time in [0.5, 10] and a range that is unbounded
/// half of the time.
Scenario small_random_scenario(std::uint64_t seed, int max_agents = 5, int max_tasks = 4);

CheckResult potential_identity(int triples = 1000, std::uint64_t seed = 1);
CheckResult ocp_oracle_equivalence(int instances = 100, int steps = 400, std::uint64_t seed = 2);
CheckResult bellman_consistency(int instances = 100, std::uint64_t seed = 3);
CheckResult finite_improvement(int instances = 100, std::uint64_t seed = 4);
CheckResult protocol_convergence(Protocol protocol, int runs = 200, std::uint64_t seed = 5);
CheckResult freeze_behavior(int runs = 100, std::uint64_t seed = 6);

/// The checks above with their acceptance parameters.
std::vector<CheckResult> run_small_suite();

// Monte Carlo reproduction of the reference team-utility table (n = p = 100).

struct TableCell {
  Protocol protocol;
  Mode mode;
  double final_time;
  std::optional<double> range;
  double reference;
};

/// Every reference cell (GRM and SAP, OLTA and DTA, unbounded and 0.3).
std::vector<TableCell> reference_table();

struct TableReproduction {
  std::vector<CellSummary> summary;
  std::vector<CheckResult> verdicts;
};

/// Runs the grid and judges every cell within `tolerance` (relative) of its
/// reference value, plus the orderings: DTA <= OLTA at the shortest final
/// time, and a shrinking OLTA - DTA gap as the final time grows.
TableReproduction table_reproduction(int runs, std::uint64_t base_seed, double tolerance,
                                     unsigned threads = 0);

/// DTA team utility at t = tf against the OLTA value on the same scenario,
/// averaged over runs, for each protocol.
CheckResult dta_reaches_olta(Protocol protocol, int runs, double final_time,
                             std::uint64_t base_seed, double tolerance);

/// Runs the same batch into two directories and compares the CSV bytes.
CheckResult batch_determinism(const std::string& scratch_dir, std::uint64_t base_seed);

}  // namespace taskgame::checks
