#include "taskgame/harness.hpp"

#include "taskgame/random.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace taskgame {

Scenario generate_scenario(int num_agents, int num_tasks, double final_time,
                           std::optional<double> range, std::uint64_t seed) {
  if (num_agents < 1 || num_tasks < 1)
    throw std::invalid_argument("generate_scenario: need at least one agent and one task");
  Rng rng = Rng::substream(seed, "scenario");
  Scenario s;
  s.final_time = final_time;
  s.range = range;
  s.agents.resize(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    auto& a = s.agents[i];
    a.agent_id = i;
    a.position.x() = rng.uniform();
    a.position.y() = rng.uniform();
    a.velocity.x() = rng.uniform(-0.1, 0.1);
    a.velocity.y() = rng.uniform(-0.1, 0.1);
  }
  s.tasks.resize(num_tasks);
  for (int j = 0; j < num_tasks; ++j) {
    auto& t = s.tasks[j];
    t.task_id = j;
    t.target_position.x() = rng.uniform();
    t.target_position.y() = rng.uniform();
    t.nominal_reward = rng.uniform();
    t.success_prob.resize(num_agents);
  }
  for (int i = 0; i < num_agents; ++i)
    for (int j = 0; j < num_tasks; ++j) s.tasks[j].success_prob[i] = rng.uniform();
  return s;
}

// Scenario files

std::string format_range(const std::optional<double>& range) {
  if (!range) return "inf";
  std::ostringstream os;
  os << *range;
  return os.str();
}

std::optional<double> parse_range(const std::string& text) {
  if (text == "inf" || text == "unbounded") return std::nullopt;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument("range must be a positive number or 'inf', got '" + text + "'");
  return value;
}

namespace {

using nlohmann::json;

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a 2-element array");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

std::optional<double> range_from(const json& j) {
  if (j.is_string()) return parse_range(j.get<std::string>());
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!(v > 0.0)) throw std::invalid_argument("range must be positive");
    return std::isinf(v) ? std::nullopt : std::optional<double>(v);
  }
  throw std::invalid_argument("range must be a number or \"inf\"");
}

}  // namespace

nlohmann::json scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["agents"] = json::array();
  for (const auto& a : scenario.agents)
    doc["agents"].push_back({{"p0", vec_json(a.position)}, {"v0", vec_json(a.velocity)}});
  doc["tasks"] = json::array();
  for (const auto& t : scenario.tasks) {
    json probs = json::array();
    for (Eigen::Index i = 0; i < t.success_prob.size(); ++i) probs.push_back(t.success_prob[i]);
    doc["tasks"].push_back(
        {{"pos", vec_json(t.target_position)}, {"reward", t.nominal_reward}, {"probs", probs}});
  }
  doc["tf"] = scenario.final_time;
  if (scenario.range)
    doc["range"] = *scenario.range;
  else
    doc["range"] = "inf";
  return doc;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  Scenario s;
  try {
    int id = 0;
    for (const auto& a : doc.at("agents")) {
      AgentState st;
      st.agent_id = id++;
      st.position = vec_from(a.at("p0"));
      st.velocity = vec_from(a.at("v0"));
      s.agents.push_back(st);
    }
    id = 0;
    for (const auto& t : doc.at("tasks")) {
      Task task;
      task.task_id = id++;
      task.target_position = vec_from(t.at("pos"));
      task.nominal_reward = t.at("reward").get<double>();
      const auto probs = t.at("probs").get<std::vector<double>>();
      task.success_prob = Eigen::Map<const Eigen::VectorXd>(probs.data(),
                                                            static_cast<Eigen::Index>(probs.size()));
      s.tasks.push_back(std::move(task));
    }
    s.final_time = doc.at("tf").get<double>();
    s.range = doc.contains("range") ? range_from(doc.at("range")) : std::nullopt;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario file: ") + e.what());
  }
  validate(s);
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

// Batch spec

BatchSpec batch_spec_from_json(const nlohmann::json& doc) {
  BatchSpec spec;
  try {
    spec.num_agents = doc.value("n", spec.num_agents);
    spec.num_tasks = doc.value("p", spec.num_tasks);
    if (doc.contains("tf")) spec.final_times = doc.at("tf").get<std::vector<double>>();
    if (doc.contains("protocols")) {
      spec.protocols.clear();
      for (const auto& p : doc.at("protocols")) spec.protocols.push_back(parse_protocol(p.get<std::string>()));
    }
    if (doc.contains("ranges")) {
      spec.ranges.clear();
      for (const auto& r : doc.at("ranges")) spec.ranges.push_back(range_from(r));
    }
    if (doc.contains("modes")) {
      spec.modes.clear();
      for (const auto& m : doc.at("modes")) spec.modes.push_back(parse_mode(m.get<std::string>()));
    }
    spec.runs = doc.value("runs", spec.runs);
    spec.base_seed = doc.value("base_seed", spec.base_seed);
    spec.threads = doc.value("threads", spec.threads);
    if (doc.contains("output_dir")) spec.output_dir = doc.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("batch spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

void validate(const BatchSpec& spec) {
  if (spec.num_agents < 1 || spec.num_tasks < 1)
    throw std::invalid_argument("batch spec: n and p must be at least 1");
  if (spec.runs < 1) throw std::invalid_argument("batch spec: runs must be at least 1");
  if (spec.final_times.empty() || spec.protocols.empty() || spec.ranges.empty() ||
      spec.modes.empty())
    throw std::invalid_argument("batch spec: every parameter list needs at least one entry");
  for (const Cell& c : expand_cells(spec)) {
    if (!(c.final_time > 0.0)) throw std::invalid_argument("batch spec: tf must be positive");
    validate(default_config(c.mode, c.protocol, c.final_time), c.final_time);
  }
}

std::vector<Cell> expand_cells(const BatchSpec& spec) {
  std::vector<Cell> cells;
  for (double tf : spec.final_times)
    for (Protocol protocol : spec.protocols)
      for (Mode mode : spec.modes)
        for (const auto& range : spec.ranges) cells.push_back({mode, protocol, tf, range});
  return cells;
}

ResultRow run_cell(const BatchSpec& spec, const Cell& cell, int run) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.cell = cell;
  row.run = run;
  row.run_seed = spec.base_seed + static_cast<std::uint64_t>(run);

  const Scenario scenario =
      generate_scenario(spec.num_agents, spec.num_tasks, cell.final_time, cell.range, row.run_seed);
  EngineConfig config = default_config(cell.mode, cell.protocol, cell.final_time, row.run_seed);
  config.record_states = false;
  const SimulationTrace trace = simulate(scenario, config);

  row.team_utility = trace.final_team_utility;
  row.converged = trace.converged;
  row.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

std::string format_double(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string cell_columns(const Cell& c) {
  std::ostringstream os;
  os << to_string(c.mode) << ',' << to_string(c.protocol) << ',' << c.final_time << ','
     << format_range(c.range);
  return os.str();
}

constexpr const char* kCellHeader = "mode,protocol,tf,range";

std::ofstream open_for_write(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

BatchResult run_batch(const BatchSpec& spec) {
  validate(spec);
  const auto cells = expand_cells(spec);
  const std::size_t total = cells.size() * static_cast<std::size_t>(spec.runs);

  std::ofstream progress;
  if (!spec.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec || !std::filesystem::is_directory(spec.output_dir))
      throw std::runtime_error("output directory unusable: " + spec.output_dir.string());
    progress = open_for_write(spec.output_dir / "progress.csv", std::ios::trunc);
    progress << kCellHeader << ",run,run_seed,team_utility,converged,wall_time\n" << std::flush;
  }

  BatchResult result;
  result.rows.resize(total);
  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const Cell& cell = cells[k / spec.runs];
      const int run = static_cast<int>(k % spec.runs);
      try {
        ResultRow row = run_cell(spec, cell, run);
        std::lock_guard lock(io);
        if (progress.is_open()) {
          progress << cell_columns(cell) << ',' << row.run << ',' << row.run_seed << ','
                   << format_double(row.team_utility, 10) << ',' << row.converged << ','
                   << format_double(row.wall_time, 6) << '\n'
                   << std::flush;
        }
        result.rows[k] = std::move(row);
      } catch (...) {
        std::lock_guard lock(io);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> utilities;
    int converged = 0;
    for (int r = 0; r < spec.runs; ++r) {
      const auto& row = result.rows[c * spec.runs + r];
      utilities.push_back(row.team_utility);
      converged += row.converged ? 1 : 0;
    }
    result.summary.push_back({cells[c], spec.runs,
                              pairwise_sum(utilities) / static_cast<double>(spec.runs),
                              static_cast<double>(converged) / spec.runs});
  }

  if (!spec.output_dir.empty()) {
    write_results_csv(result, spec.output_dir / "results.csv");
    write_summary_csv(result, spec.output_dir / "summary.csv");
  }
  return result;
}

void write_results_csv(const BatchResult& result, const std::filesystem::path& path) {
  auto out = open_for_write(path, std::ios::trunc);
  out << kCellHeader << ",run,run_seed,team_utility,converged\n";
  for (const auto& row : result.rows)
    out << cell_columns(row.cell) << ',' << row.run << ',' << row.run_seed << ','
        << format_double(row.team_utility, 10) << ',' << row.converged << '\n';
}

void write_summary_csv(const BatchResult& result, const std::filesystem::path& path) {
  auto out = open_for_write(path, std::ios::trunc);
  out << kCellHeader << ",runs,mean_team_utility,converged_fraction\n";
  for (const auto& s : result.summary)
    out << cell_columns(s.cell) << ',' << s.runs << ',' << format_double(s.mean_team_utility, 4)
        << ',' << format_double(s.converged_fraction, 4) << '\n';
}

void dump_trace(const SimulationTrace& trace, const std::filesystem::path& path) {
  auto out = open_for_write(path, std::ios::trunc);
  out << "time,agent_id,px,py,vx,vy,assignment,team_utility\n";
  out.precision(12);
  for (const auto& r : trace.records) {
    if (r.states.size() != r.profile.size())
      throw std::invalid_argument("dump_trace: trace was recorded without agent states");
    for (std::size_t i = 0; i < r.states.size(); ++i) {
      const auto& s = r.states[i];
      const int a = r.profile[i].is_null() ? -1 : r.profile[i].task_id();
      out << r.time << ',' << i << ',' << s.position.x() << ',' << s.position.y() << ','
          << s.velocity.x() << ',' << s.velocity.y() << ',' << a << ',' << r.team_utility << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace taskgame
