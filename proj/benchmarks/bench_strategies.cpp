// Per-control-step cost of each coordination strategy on the builtin scenes,
// measured at a mid-morning decision point with occupancy inside the horizon.

#include "zonempc/allocation.hpp"
#include "zonempc/config.hpp"
#include "zonempc/mpc.hpp"
#include "zonempc/scenario.hpp"
#include "zonempc/thermal.hpp"

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace {

namespace alloc = zonempc::alloc;
namespace mpc = zonempc::mpc;
namespace sim = zonempc::sim;
namespace th = zonempc::thermal;

struct StepScene {
  sim::Scenario scn;
  th::MultiZoneModel model;
  Eigen::VectorXd x;
  std::vector<th::Vector9> states;
  std::vector<mpc::HorizonSlice> slices;
  std::vector<mpc::LocalConfig> configs;
  alloc::StepInputs inputs;  // spans point into the members above

  explicit StepScene(const std::string& name) {
    zonempc::config::ScenarioSpec spec = zonempc::config::builtin_spec(name);
    spec.steps = 64;
    scn = spec.materialize();
    model = scn.build_model();
    x = scn.initial_state();
    const int k = 44;  // 11:00, bands active
    slices = sim::horizon_slices(scn, model, k, x);
    for (int m = 0; m < scn.zone_count(); ++m) {
      states.push_back(x.segment<th::kStateDim>(m * th::kStateDim));
      configs.push_back({scn.horizon, scn.comfort_weight, scn.u_min_w(m), scn.u_max_w(m)});
    }
    inputs.zones = model.zones;
    inputs.states = states;
    inputs.slices = slices;
    inputs.configs = configs;
    inputs.cap_now = scn.cap_slice(k);
    inputs.cap_next = scn.cap_slice(k + 1);
  }
};

void bm_centralized(benchmark::State& state, const std::string& name) {
  const StepScene scene(name);
  mpc::CentralConfig cfg;
  cfg.horizon = scene.scn.horizon;
  cfg.comfort_weight = scene.scn.comfort_weight;
  cfg.priority_weight.resize(scene.scn.zone_count());
  for (int m = 0; m < scene.scn.zone_count(); ++m) {
    cfg.priority_weight(m) =
        scene.scn.theta_by_level[scene.scn.priorities.level_of_zone[m] - 1];
  }
  cfg.u_min = scene.scn.u_min_w;
  cfg.u_max = scene.scn.u_max_w;
  cfg.cap = scene.inputs.cap_now;
  for (auto _ : state) {
    const mpc::CentralResult res =
        mpc::solve_centralized(scene.model, scene.x, scene.slices, cfg);
    benchmark::DoNotOptimize(res.objective);
  }
}

void bm_decentralized(benchmark::State& state, const std::string& name) {
  const StepScene scene(name);
  for (auto _ : state) {
    double total = 0.0;
    for (int m = 0; m < scene.scn.zone_count(); ++m) {
      const mpc::LocalPlan plan = mpc::solve_decentralized(
          scene.model.zones[m], scene.states[m], scene.slices[m], scene.configs[m],
          scene.inputs.cap_now, scene.scn.zone_count());
      total += plan.objective;
    }
    benchmark::DoNotOptimize(total);
  }
}

void bm_priority_chain(benchmark::State& state, const std::string& name) {
  const StepScene scene(name);
  const bool one_to_one = scene.scn.strategy == sim::Strategy::DistributedOneToOne;
  for (auto _ : state) {
    if (one_to_one) {
      alloc::OneToOneState chain =
          alloc::OneToOneState::init(scene.scn.zone_count(), scene.inputs.cap_now);
      const alloc::StepResult res = alloc::step_one_to_one(scene.inputs, chain);
      benchmark::DoNotOptimize(res.applied.sum());
    } else {
      alloc::MultiToOneState info =
          alloc::MultiToOneState::init(scene.scn.priorities, scene.inputs.cap_now);
      const alloc::StepResult res =
          alloc::step_multi_to_one(scene.inputs, scene.scn.priorities, info);
      benchmark::DoNotOptimize(res.applied.sum());
    }
  }
}

}  // namespace

BENCHMARK_CAPTURE(bm_centralized, small3, std::string("small3"))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_centralized, large36, std::string("large36"))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_decentralized, small3, std::string("small3"))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_decentralized, large36, std::string("large36"))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_priority_chain, small3, std::string("small3"))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_priority_chain, large36, std::string("large36"))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
