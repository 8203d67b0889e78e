// zonempc: run multi-zone HVAC allocation scenarios, sweep Pareto fronts and
// compare coordination strategies from the command line.

#include "zonempc/config.hpp"
#include "zonempc/io.hpp"
#include "zonempc/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace zonempc;

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

struct Overrides {
  std::string scenario = "small3";
  std::string strategy;  // empty = keep the scenario's own
  std::string cap;       // "scarce" | "sufficient" | watts
  double alpha = -1.0;
  int horizon = 0;
  int steps = 0;
  int days = 0;
  long long seed = -1;
  int jobs = 0;
  double noise = -1.0;
  std::string out;
};

std::filesystem::path output_root(const Overrides& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("ZONEMPC_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

bool is_builtin(const std::string& name) {
  const auto names = config::builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

// "distributed" picks the coordinator that matches the priority structure.
std::string resolve_strategy(const std::string& name, const config::ScenarioSpec& spec) {
  if (name != "distributed") {
    sim::parse_strategy(name);  // throws on anything unrecognized
    return name;
  }
  for (size_t m = 0; m < spec.priority_of_zone.size(); ++m) {
    if (spec.priority_of_zone[m] != static_cast<int>(m) + 1) {
      return "distributed-multi-to-one";
    }
  }
  return "distributed-one-to-one";
}

double resolve_cap(const std::string& cap, int zones) {
  if (cap == "scarce") return config::kScarceCapSmallW * zones / 3.0;
  if (cap == "sufficient") return config::kSufficientCapSmallW * zones / 3.0;
  size_t used = 0;
  double watts = 0.0;
  try {
    watts = std::stod(cap, &used);
  } catch (const std::exception&) {
    throw config::ConfigError("cap must be 'scarce', 'sufficient' or watts: " + cap);
  }
  if (used != cap.size() || !(watts >= 0.0)) {
    throw config::ConfigError("cap must be 'scarce', 'sufficient' or watts: " + cap);
  }
  return watts;
}

config::ScenarioSpec load_with_overrides(const Overrides& o) {
  config::ScenarioSpec spec =
      is_builtin(o.scenario) ? config::builtin_spec(o.scenario) : config::load_spec(o.scenario);
  if (o.steps > 0) spec.steps = o.steps;
  if (o.days > 0) {
    spec.days = o.days;
    if (o.steps <= 0) spec.steps = 0;
  }
  if (o.horizon > 0) spec.horizon = o.horizon;
  if (o.alpha >= 0.0) spec.comfort_weight = o.alpha;
  if (o.seed >= 0) spec.seed = static_cast<std::uint64_t>(o.seed);
  if (o.jobs > 0) spec.jobs = o.jobs;
  if (o.noise >= 0.0) spec.plant_temp_noise_c = o.noise;
  if (!o.cap.empty()) spec.cap_total_w = resolve_cap(o.cap, spec.zones);
  if (!o.strategy.empty()) spec.strategy = resolve_strategy(o.strategy, spec);
  return spec;
}

void print_summary(const config::ScenarioSpec& spec, const sim::SimulationResult& r) {
  std::printf("scenario %s  strategy %s  zones %d  steps %d\n", spec.name.c_str(),
              sim::to_string(r.strategy), spec.zones, r.steps);
  for (size_t s = 0; s < r.comfort_index_by_level.size(); ++s) {
    std::printf("  priority %zu: comfort index %.4f  energy rate %.1f W\n", s + 1,
                r.comfort_index_by_level[s], r.energy_rate_by_level_w[s]);
  }
  const double violation =
      r.cap_violation_w.size() > 0 ? r.cap_violation_w.maxCoeff() : 0.0;
  std::printf("  overall comfort index %.4f\n", r.overall_comfort_index);
  std::printf("  max cap violation %.6g W\n", violation);
  std::printf("  wall time %.2f s  stalled solves %d\n", r.wall_time_s, r.stalled_solves);
}

int cmd_run(const Overrides& o) {
  const config::ScenarioSpec spec = load_with_overrides(o);
  const sim::Scenario scenario = spec.materialize();
  const sim::SimulationResult result = sim::run_closed_loop(scenario);

  const std::filesystem::path dir =
      output_root(o) / (spec.name + "-" + sim::to_string(scenario.strategy));
  io::write_trajectories_csv(dir / "trajectories.csv", result);
  io::write_metrics_csv(dir / "metrics.csv", result);
  print_summary(spec, result);
  std::printf("wrote %s\n", (dir / "trajectories.csv").string().c_str());
  std::printf("wrote %s\n", (dir / "metrics.csv").string().c_str());
  return 0;
}

int cmd_sweep(const Overrides& o, std::vector<std::string> strategies,
              std::vector<double> alphas, const std::string& mode) {
  const config::ScenarioSpec spec = load_with_overrides(o);
  if (alphas.size() < 2) {
    throw config::ConfigError("a sweep needs at least two alpha values");
  }
  sim::SweepMode sweep_mode;
  if (mode == "single-step") {
    sweep_mode = sim::SweepMode::SingleStep;
  } else if (mode == "closed-loop") {
    sweep_mode = sim::SweepMode::ClosedLoop;
  } else {
    throw config::ConfigError("mode must be single-step or closed-loop: " + mode);
  }

  std::vector<sim::Strategy> parsed;
  for (const std::string& name : strategies) {
    const sim::Strategy s = sim::parse_strategy(resolve_strategy(name, spec));
    if (std::find(parsed.begin(), parsed.end(), s) == parsed.end()) parsed.push_back(s);
  }

  const sim::Scenario scenario = spec.materialize();
  const std::vector<sim::ParetoPoint> points =
      sim::pareto_sweep(scenario, alphas, parsed, sweep_mode);

  const std::filesystem::path dir = output_root(o) / (spec.name + "-sweep");
  io::write_pareto_csv(dir / "pareto.csv", points);
  std::printf("scenario %s  mode %s  strategies %zu  alphas %zu  points %zu\n",
              spec.name.c_str(), mode.c_str(), parsed.size(), alphas.size(), points.size());
  std::printf("wrote %s\n", (dir / "pareto.csv").string().c_str());
  return 0;
}

int cmd_compare(const Overrides& o) {
  const config::ScenarioSpec base = load_with_overrides(o);

  std::vector<std::string> names{"centralized", "decentralized",
                                 resolve_strategy("distributed", base)};
  std::vector<sim::SimulationResult> results;
  for (const std::string& name : names) {
    config::ScenarioSpec spec = base;
    spec.strategy = name;
    results.push_back(sim::run_closed_loop(spec.materialize()));
  }

  const std::filesystem::path dir = output_root(o) / (base.name + "-compare");
  std::filesystem::create_directories(dir);
  const std::filesystem::path csv = dir / "comparison.csv";
  {
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    // wall times go to stdout only, so equal-seed reruns produce equal files
    out << "strategy,priority,comfort_index,energy_rate_w,overall_comfort_index,"
           "max_cap_violation_w\n";
    for (const sim::SimulationResult& r : results) {
      const double violation =
          r.cap_violation_w.size() > 0 ? r.cap_violation_w.maxCoeff() : 0.0;
      for (size_t s = 0; s < r.comfort_index_by_level.size(); ++s) {
        out << sim::to_string(r.strategy) << ',' << (s + 1) << ','
            << io::format_double(r.comfort_index_by_level[s]) << ','
            << io::format_double(r.energy_rate_by_level_w[s]) << ','
            << io::format_double(r.overall_comfort_index) << ','
            << io::format_double(violation) << '\n';
      }
    }
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + csv.string());
  }

  std::printf("%-26s", "strategy");
  for (size_t s = 0; s < results[0].comfort_index_by_level.size(); ++s) {
    std::printf("  I_c%zu", s + 1);
  }
  std::printf("    I_c0  max viol W  wall s\n");
  for (const sim::SimulationResult& r : results) {
    std::printf("%-26s", sim::to_string(r.strategy));
    for (double ic : r.comfort_index_by_level) std::printf("  %.4f", ic);
    const double violation =
        r.cap_violation_w.size() > 0 ? r.cap_violation_w.maxCoeff() : 0.0;
    std::printf("  %.4f  %10.4g  %6.2f\n", r.overall_comfort_index, violation,
                r.wall_time_s);
  }
  std::printf("wrote %s\n", csv.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-zone HVAC energy allocation: simulate, sweep, compare"};
  app.require_subcommand(1);

  Overrides o;
  std::vector<std::string> strategies{"centralized", "decentralized", "distributed"};
  std::vector<double> alphas{1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  std::string mode = "single-step";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", o.scenario, "builtin name (small3, large36) or config path");
    cmd->add_option("--cap", o.cap, "'scarce', 'sufficient' or total watts per step");
    cmd->add_option("--horizon", o.horizon, "prediction horizon steps")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", o.steps, "simulated steps")->check(CLI::PositiveNumber);
    cmd->add_option("--days", o.days, "simulated days")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "rng seed")->check(CLI::NonNegativeNumber);
    cmd->add_option("--jobs", o.jobs, "parallel zone solves")->check(CLI::PositiveNumber);
    cmd->add_option("--noise", o.noise, "plant outdoor-temp noise std dev, deg C");
    cmd->add_option("--out", o.out, "output directory (default $ZONEMPC_OUT or ./out)");
  };

  CLI::App* run = app.add_subcommand("run", "closed-loop simulation of one strategy");
  add_common(run);
  run->add_option("--strategy", o.strategy,
                  "centralized | decentralized | distributed[-one-to-one|-multi-to-one]");
  run->add_option("--alpha", o.alpha, "comfort weight")->check(CLI::NonNegativeNumber);

  CLI::App* sweep = app.add_subcommand("sweep", "Pareto sweep over comfort weights");
  add_common(sweep);
  sweep->add_option("--strategies", strategies, "strategies to sweep")->delimiter(',');
  sweep->add_option("--alphas", alphas, "comfort weights to sweep")->delimiter(',');
  sweep->add_option("--mode", mode, "single-step | closed-loop");

  CLI::App* compare = app.add_subcommand("compare", "run every strategy on one scenario");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o, strategies, alphas, mode);
    return cmd_compare(o);
  } catch (const config::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }
}
