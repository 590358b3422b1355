#include "checks/checks.hpp"

#include "checks/oracles.hpp"
#include "taskgame/engine.hpp"
#include "taskgame/negotiation.hpp"
#include "taskgame/optimal_control.hpp"
#include "taskgame/random.hpp"
#include "taskgame/utilities.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace taskgame::checks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

AgentState random_state(Rng& rng, int id = 0) {
  AgentState s;
  s.agent_id = id;
  s.position = Vec2(rng.uniform(), rng.uniform());
  s.velocity = Vec2(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
  return s;
}

AssignmentProfile random_profile(const GameSnapshot& game, Rng& rng) {
  AssignmentProfile profile(static_cast<std::size_t>(game.num_agents()));
  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& acts = game.action_set(i);
    profile[i] = acts[rng.index(acts.size())];
  }
  return profile;
}

Scenario fixed_size_scenario(int n, int p, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "check-instance");
  const double tf = rng.uniform(0.5, 10.0);
  std::optional<double> range;
  if (rng.uniform() < 0.5) range = rng.uniform(0.2, 1.0);
  return generate_scenario(n, p, tf, range, seed);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

Scenario small_random_scenario(std::uint64_t seed, int max_agents, int max_tasks) {
  Rng rng = Rng::substream(seed, "small-size");
  const int n = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_agents)));
  const int p = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_tasks)));
  return fixed_size_scenario(n, p, seed);
}

CheckResult potential_identity(int triples, std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = Rng::substream(seed, "potential");
  double worst = 0.0;
  int failures = 0;
  for (int t = 0; t < triples; ++t) {
    auto scenario = std::make_shared<const Scenario>(small_random_scenario(seed * 100003 + t));
    std::vector<AgentState> states;
    for (int i = 0; i < scenario->num_agents(); ++i) states.push_back(random_state(rng, i));
    const GameSnapshot game(scenario, states, rng.uniform(0.2, scenario->final_time));

    const AssignmentProfile profile = random_profile(game, rng);
    const int i = static_cast<int>(rng.index(static_cast<std::uint64_t>(game.num_agents())));
    const auto& acts = game.action_set(i);
    const Assignment deviation = acts[rng.index(acts.size())];
    const AssignmentProfile moved = profile.with(i, deviation);

    const double d_agent = agent_utility(game, moved, i) - agent_utility(game, profile, i);
    const double d_team = team_utility(game, moved) - team_utility(game, profile);
    const double err = std::abs(d_agent - d_team);
    worst = std::max(worst, err);
    if (!(err < 1e-9)) ++failures;
  }
  const double secs = seconds_since(start);
  CheckResult r{"potential identity", failures == 0 && secs < 5.0, "", secs};
  r.detail = std::to_string(triples - failures) + "/" + std::to_string(triples) +
             " triples within 1e-9 (max err " + fmt(worst) + "), " + fmt(secs) + " s (< 5 s)";
  return r;
}

CheckResult ocp_oracle_equivalence(int instances, int steps, std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = Rng::substream(seed, "ocp");
  double worst_rel = 0.0;
  double worst_terminal = 0.0;
  int failures = 0;
  for (int k = 0; k < instances; ++k) {
    const AgentState state = random_state(rng);
    const Vec2 target(rng.uniform(), rng.uniform());
    const double h = rng.uniform(0.5, 10.0);

    const ControlPlan plan = solve_ocp(state, target, h);
    const double closed = cost_to_go(plan);
    const auto numeric = oracle::collocation_ocp(state, target, h, steps);
    const double rel = std::abs(closed - numeric.cost) / std::max(numeric.cost, 1e-12);

    const AgentState end = propagate(plan, h);
    const double terminal =
        std::max((end.position - target).norm(), end.velocity.norm());
    worst_rel = std::max(worst_rel, rel);
    worst_terminal = std::max(worst_terminal, terminal);
    if (!(rel < 1e-4) || !(terminal < 1e-9)) ++failures;
  }
  const double secs = seconds_since(start);
  CheckResult r{"OCP oracle equivalence", failures == 0 && secs < 30.0, "", secs};
  r.detail = std::to_string(instances - failures) + "/" + std::to_string(instances) +
             " instances; max rel cost err " + fmt(worst_rel) + " (< 1e-4, " +
             std::to_string(steps) + " steps), max terminal err " + fmt(worst_terminal) +
             " (< 1e-9)";
  return r;
}

CheckResult bellman_consistency(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = Rng::substream(seed, "bellman");
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < instances; ++k) {
    const AgentState state = random_state(rng);
    Task task;
    task.target_position = Vec2(rng.uniform(), rng.uniform());
    task.success_prob = Eigen::VectorXd::Ones(1);
    const double h = rng.uniform(0.5, 10.0);
    const double s = h * rng.uniform(0.01, 0.99);

    const ControlPlan plan = solve_ocp(state, task, h);
    const double whole = cost_to_go(plan);
    const double split = energy_spent(plan, s) + completion_cost(propagate(plan, s), task, h - s);
    const double err = std::abs(whole - split);
    worst = std::max(worst, err);
    if (!(err < 1e-9)) ++failures;
  }
  CheckResult r{"Bellman consistency", failures == 0, "", seconds_since(start)};
  r.detail = std::to_string(instances - failures) + "/" + std::to_string(instances) +
             " splits within 1e-9 (max err " + fmt(worst) + ")";
  return r;
}

CheckResult finite_improvement(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = Rng::substream(seed, "better-reply");
  int passed = 0;
  int total_steps = 0;
  for (int k = 0; k < instances; ++k) {
    auto scenario = std::make_shared<const Scenario>(fixed_size_scenario(4, 4, seed * 7919 + k));
    const GameSnapshot game = GameSnapshot::initial(scenario);
    const oracle::BruteForceGame brute(*scenario, scenario->agents, scenario->final_time);

    AssignmentProfile profile = random_profile(game, rng);
    double value = team_utility(game, profile);
    bool monotone = true;
    for (int step = 0; step < 10000; ++step) {
      // Collect every strictly improving unilateral move, take one at random.
      std::vector<std::pair<int, Assignment>> moves;
      for (int i = 0; i < game.num_agents(); ++i) {
        const double current = agent_utility(game, profile, i);
        for (Assignment a : game.action_set(i))
          if (agent_utility(game, profile.with(i, a), i) > current + kImprovementTolerance)
            moves.emplace_back(i, a);
      }
      if (moves.empty()) break;
      const auto [i, a] = moves[rng.index(moves.size())];
      profile = profile.with(i, a);
      const double next = team_utility(game, profile);
      if (!(next > value)) monotone = false;
      value = next;
      ++total_steps;
    }
    if (monotone && exhaustive_nash_check(game, profile) && brute.is_nash(profile)) ++passed;
  }
  CheckResult r{"finite improvement property", passed == instances, "", seconds_since(start)};
  r.detail = std::to_string(passed) + "/" + std::to_string(instances) +
             " runs strictly improving and ending at a Nash equilibrium (" +
             std::to_string(total_steps) + " improving steps)";
  return r;
}

CheckResult protocol_convergence(Protocol protocol, int runs, std::uint64_t seed) {
  const auto start = Clock::now();
  const int stages = protocol == Protocol::SAP ? 1000 : 100;
  int reached = 0;
  for (int k = 0; k < runs; ++k) {
    const std::uint64_t run_seed = seed * 104729 + static_cast<std::uint64_t>(k);
    auto scenario = std::make_shared<const Scenario>(fixed_size_scenario(4, 4, run_seed));
    const GameSnapshot game = GameSnapshot::initial(scenario);
    const oracle::BruteForceGame brute(*scenario, scenario->agents, scenario->final_time);

    ProtocolParams params;
    params.protocol = protocol;
    params.rng_seed = run_seed;
    Negotiator negotiator(params, scenario->num_agents());
    AssignmentProfile profile = negotiator.random_feasible_profile(game);
    for (int s = 0; s < stages; ++s) profile = negotiator.stage_update(game, profile);
    if (brute.is_nash(profile)) ++reached;
  }
  const double fraction = static_cast<double>(reached) / runs;
  CheckResult r{std::string("protocol convergence (") + std::string(to_string(protocol)) + ")",
                fraction >= 0.9, "", seconds_since(start)};
  r.detail = std::to_string(reached) + "/" + std::to_string(runs) + " runs at a Nash equilibrium after " +
             std::to_string(stages) + " stages (need >= 90%)";
  return r;
}

CheckResult freeze_behavior(int runs, std::uint64_t seed) {
  const auto start = Clock::now();
  int converged = 0;
  int frozen_ok = 0;
  for (int k = 0; k < runs; ++k) {
    const std::uint64_t run_seed = seed * 15485863ULL + static_cast<std::uint64_t>(k);
    const Scenario scenario = generate_scenario(10, 10, 10.0, std::nullopt, run_seed);
    EngineConfig config = default_config(Mode::DTA, Protocol::GRM, 10.0, run_seed);
    const int freeze = freeze_boundary(10.0, config.epsilon, config.dt);

    const GameSnapshot* frozen = nullptr;
    Eigen::MatrixXd frozen_costs;
    bool identical = true;
    auto cost_matrix = [](const GameSnapshot& g) {
      Eigen::MatrixXd m(g.num_agents(), g.num_tasks());
      for (int i = 0; i < g.num_agents(); ++i)
        for (int j = 0; j < g.num_tasks(); ++j) m(i, j) = g.completion_cost(i, j);
      return m;
    };
    config.observer = [&](int stage, const GameSnapshot& game, const AssignmentProfile&) {
      if (stage == freeze) {
        frozen = &game;
        frozen_costs = cost_matrix(game);
      } else if (stage > freeze) {
        const Eigen::MatrixXd now = cost_matrix(game);
        if (&game != frozen || now.size() != frozen_costs.size() ||
            std::memcmp(now.data(), frozen_costs.data(), sizeof(double) * now.size()) != 0)
          identical = false;
      }
    };
    const SimulationTrace trace = solve_dta(scenario, config);
    if (trace.converged) ++converged;
    if (identical && frozen) ++frozen_ok;
  }
  const double fraction = static_cast<double>(converged) / runs;
  CheckResult r{"freeze behavior", fraction >= 0.9 && frozen_ok == runs, "", seconds_since(start)};
  r.detail = std::to_string(converged) + "/" + std::to_string(runs) +
             " DTA runs constant over the final half of the freeze window (need >= 90%); " +
             std::to_string(frozen_ok) + "/" + std::to_string(runs) +
             " with bit-identical post-freeze utilities";
  return r;
}

std::vector<CheckResult> run_small_suite() {
  return {potential_identity(),
          ocp_oracle_equivalence(),
          bellman_consistency(),
          finite_improvement(),
          protocol_convergence(Protocol::GRM),
          protocol_convergence(Protocol::SAP),
          freeze_behavior()};
}

std::vector<TableCell> reference_table() {
  const std::optional<double> inf;
  const std::optional<double> r03 = 0.3;
  // Columns: GRM OLTA (inf, 0.3), GRM DTA (inf, 0.3), SAP OLTA, SAP DTA.
  const double tf[3] = {2.0, 5.0, 10.0};
  const double values[3][8] = {
      {37.1087, 39.2745, 25.4762, 33.9018, 40.4893, 39.3430, 35.8556, 36.2413},
      {44.4502, 42.6770, 43.2366, 42.4138, 44.2700, 41.9399, 43.3736, 41.4702},
      {45.2247, 42.9761, 44.9560, 43.2582, 44.7164, 42.2792, 44.5670, 42.5155},
  };
  std::vector<TableCell> cells;
  for (int row = 0; row < 3; ++row) {
    int col = 0;
    for (Protocol p : {Protocol::GRM, Protocol::SAP})
      for (Mode m : {Mode::OLTA, Mode::DTA})
        for (const auto& range : {inf, r03}) cells.push_back({p, m, tf[row], range, values[row][col++]});
  }
  return cells;
}

TableReproduction table_reproduction(int runs, std::uint64_t base_seed, double tolerance,
                                     unsigned threads) {
  const auto start = Clock::now();
  BatchSpec spec;
  spec.num_agents = 100;
  spec.num_tasks = 100;
  spec.final_times = {2.0, 5.0, 10.0};
  spec.protocols = {Protocol::GRM, Protocol::SAP};
  spec.ranges = {std::nullopt, 0.3};
  spec.modes = {Mode::OLTA, Mode::DTA};
  spec.runs = runs;
  spec.base_seed = base_seed;
  spec.threads = threads;
  const BatchResult batch = run_batch(spec);
  const double secs = seconds_since(start);

  auto mean_of = [&](Protocol p, Mode m, double tf, std::optional<double> range) {
    for (const auto& s : batch.summary)
      if (s.cell.protocol == p && s.cell.mode == m && s.cell.final_time == tf &&
          s.cell.range == range)
        return s.mean_team_utility;
    return std::nan("");
  };

  TableReproduction out;
  out.summary = batch.summary;
  for (const auto& cell : reference_table()) {
    const double got = mean_of(cell.protocol, cell.mode, cell.final_time, cell.range);
    const double rel = (got - cell.reference) / cell.reference;
    CheckResult r;
    r.name = std::string("table ") + std::string(to_string(cell.protocol)) + "/" +
             std::string(to_string(cell.mode)) + " range=" + format_range(cell.range) +
             " tf=" + fmt(cell.final_time);
    r.passed = std::abs(rel) <= tolerance;
    r.detail = "mean " + fmt(got) + " vs reference " + fmt(cell.reference) + " (" +
               fmt(100.0 * rel) + "%, tolerance " + fmt(100.0 * tolerance) + "%)";
    out.verdicts.push_back(std::move(r));
  }

  for (Protocol p : {Protocol::GRM, Protocol::SAP}) {
    for (const auto& range : {std::optional<double>{}, std::optional<double>{0.3}}) {
      const std::string tag = std::string(to_string(p)) + " range=" + format_range(range);
      double gap[3];
      const double tfs[3] = {2.0, 5.0, 10.0};
      for (int k = 0; k < 3; ++k)
        gap[k] = mean_of(p, Mode::OLTA, tfs[k], range) - mean_of(p, Mode::DTA, tfs[k], range);
      out.verdicts.push_back({"ordering DTA <= OLTA at tf=2 (" + tag + ")", gap[0] >= 0.0,
                              "OLTA - DTA = " + fmt(gap[0]), 0.0});
      out.verdicts.push_back({"ordering gap shrinks over tf (" + tag + ")",
                              gap[0] >= gap[1] && gap[1] >= gap[2],
                              "OLTA - DTA = " + fmt(gap[0]) + ", " + fmt(gap[1]) + ", " + fmt(gap[2]),
                              0.0});
    }
  }
  out.verdicts.push_back({"table grid runtime", secs <= 1800.0, fmt(secs) + " s (<= 1800 s)", secs});
  return out;
}

CheckResult dta_reaches_olta(Protocol protocol, int runs, double final_time,
                             std::uint64_t base_seed, double tolerance) {
  const auto start = Clock::now();
  double olta = 0.0;
  double dta = 0.0;
  for (int k = 0; k < runs; ++k) {
    const std::uint64_t run_seed = base_seed + static_cast<std::uint64_t>(k);
    const Scenario scenario = generate_scenario(100, 100, final_time, std::nullopt, run_seed);
    EngineConfig config = default_config(Mode::OLTA, protocol, final_time, run_seed);
    config.record_states = false;
    olta += solve_olta(scenario, config).final_team_utility;
    config.mode = Mode::DTA;
    dta += solve_dta(scenario, config).final_team_utility;
  }
  olta /= runs;
  dta /= runs;
  const double rel = std::abs(dta - olta) / olta;
  CheckResult r{std::string("DTA reaches OLTA by tf (") + std::string(to_string(protocol)) + ")",
                rel <= tolerance, "", seconds_since(start)};
  r.detail = "DTA " + fmt(dta) + " vs OLTA " + fmt(olta) + " at t=" + fmt(final_time) + " (" +
             fmt(100.0 * rel) + "%, tolerance " + fmt(100.0 * tolerance) + "%, " +
             std::to_string(runs) + " runs)";
  return r;
}

CheckResult batch_determinism(const std::string& scratch_dir, std::uint64_t base_seed) {
  namespace fs = std::filesystem;
  const auto start = Clock::now();
  BatchSpec spec;
  spec.num_agents = 10;
  spec.num_tasks = 10;
  spec.final_times = {2.0, 5.0};
  spec.protocols = {Protocol::GRM, Protocol::SAP};
  spec.ranges = {std::nullopt, 0.3};
  spec.modes = {Mode::OLTA, Mode::DTA};
  spec.runs = 3;
  spec.base_seed = base_seed;

  const fs::path a = fs::path(scratch_dir) / "first";
  const fs::path b = fs::path(scratch_dir) / "second";
  fs::remove_all(a);
  fs::remove_all(b);
  spec.output_dir = a;
  run_batch(spec);
  spec.output_dir = b;
  run_batch(spec);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  bool same = true;
  std::size_t bytes = 0;
  for (const char* name : {"results.csv", "summary.csv"}) {
    const std::string x = slurp(a / name);
    const std::string y = slurp(b / name);
    same = same && !x.empty() && x == y;
    bytes += x.size();
  }
  CheckResult r{"batch determinism", same, "", seconds_since(start)};
  r.detail = same ? "results.csv and summary.csv byte-identical (" + std::to_string(bytes) + " bytes)"
                  : "CSV outputs differ between identical batches";
  return r;
}

}  // namespace taskgame::checks
