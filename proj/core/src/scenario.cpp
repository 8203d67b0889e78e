#include "zonempc/scenario.hpp"

#include "zonempc/parallel.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace zonempc::sim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<thermal::Vector9> split_states(const Eigen::VectorXd& x, int n) {
  std::vector<thermal::Vector9> out(n);
  for (int m = 0; m < n; ++m) out[m] = x.segment<thermal::kStateDim>(m * thermal::kStateDim);
  return out;
}

std::vector<mpc::LocalConfig> local_configs(const Scenario& s) {
  std::vector<mpc::LocalConfig> cfgs(s.zone_count());
  for (int m = 0; m < s.zone_count(); ++m) {
    cfgs[m] = mpc::LocalConfig{s.horizon, s.comfort_weight, s.u_min_w(m), s.u_max_w(m)};
  }
  return cfgs;
}

mpc::CentralConfig central_config(const Scenario& s) {
  mpc::CentralConfig cfg;
  cfg.horizon = s.horizon;
  cfg.comfort_weight = s.comfort_weight;
  cfg.priority_weight.resize(s.zone_count());
  for (int m = 0; m < s.zone_count(); ++m) {
    cfg.priority_weight(m) = s.theta_by_level[s.priorities.level_of_zone[m] - 1];
  }
  cfg.u_min = s.u_min_w;
  cfg.u_max = s.u_max_w;
  return cfg;
}

qp::WarmStart warm_from(const qp::Solution& sol) {
  return qp::WarmStart{sol.primal, sol.dual};
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Centralized: return "centralized";
    case Strategy::Decentralized: return "decentralized";
    case Strategy::DistributedOneToOne: return "distributed-one-to-one";
    case Strategy::DistributedMultiToOne: return "distributed-multi-to-one";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "centralized") return Strategy::Centralized;
  if (name == "decentralized") return Strategy::Decentralized;
  if (name == "distributed-one-to-one") return Strategy::DistributedOneToOne;
  if (name == "distributed-multi-to-one") return Strategy::DistributedMultiToOne;
  throw std::invalid_argument("unknown strategy: " + name);
}

void Scenario::validate() const {
  const int n = zone_count();
  require(n >= 1, "scenario needs at least one zone");
  require(steps >= 1, "steps must be >= 1");
  require(horizon >= 1, "horizon must be >= 1");
  require(dt_s > 0, "dt_s must be positive");
  require(comfort_weight >= 0, "comfort_weight must be nonnegative");
  require(jobs >= 1, "jobs must be >= 1");
  require(plant_temp_noise_c >= 0, "noise level must be nonnegative");

  priorities.validate();
  require(priorities.zone_count() == n, "priorities must cover every zone");
  require(static_cast<int>(theta_by_level.size()) == priorities.num_levels(),
          "one theta per priority level required");
  for (double t : theta_by_level) require(t > 0, "theta weights must be positive");

  require(u_min_w.size() == n && u_max_w.size() == n, "per-zone input bounds required");
  for (int m = 0; m < n; ++m) {
    require(u_min_w(m) <= u_max_w(m), "u_min must not exceed u_max");
    require(u_min_w(m) >= 0, "inputs are magnitudes; u_min must be >= 0");
  }

  require(static_cast<int>(adjacency.size()) == n, "adjacency must cover every zone");
  require(static_cast<int>(comfort.size()) == n, "one comfort schedule per zone required");
  const int needed = steps + horizon;
  for (const auto& c : comfort) {
    c.validate();
    require(c.size() >= needed + 1, "comfort schedule too short for the horizon");
  }
  price.validate();
  require(price.size() >= needed, "price schedule too short for the horizon");
  require(static_cast<int>(cap_w.size()) >= needed + 1, "cap schedule too short");
  for (double c : cap_w) require(c >= 0 && std::isfinite(c), "caps must be nonnegative");
  require(static_cast<int>(disturbance.size()) == n, "one disturbance track per zone");
  for (const auto& track : disturbance) {
    require(static_cast<int>(track.size()) >= needed + 1, "disturbance track too short");
  }
  require(initial_zone_temp_c.size() == n, "one initial temperature per zone");

  if (strategy == Strategy::DistributedOneToOne) {
    for (int m = 0; m < n; ++m) {
      require(priorities.level_of_zone[m] == m + 1,
              "one-to-one strategy needs singleton priorities in zone order");
    }
  }
}

thermal::MultiZoneModel Scenario::build_model() const {
  std::vector<thermal::DiscreteZoneModel> zones;
  zones.reserve(zone_params.size());
  for (const auto& p : zone_params) {
    zones.push_back(thermal::discretize(thermal::build_zone_matrices(p), dt_s, mode));
  }
  return thermal::compose_multizone(std::move(zones), adjacency);
}

Eigen::VectorXd Scenario::initial_state() const {
  Eigen::VectorXd x(zone_count() * thermal::kStateDim);
  for (int m = 0; m < zone_count(); ++m) {
    x.segment<thermal::kStateDim>(m * thermal::kStateDim)
        .setConstant(initial_zone_temp_c(m));
  }
  return x;
}

Eigen::VectorXd Scenario::cap_slice(int k) const {
  Eigen::VectorXd out(horizon);
  for (int l = 0; l < horizon; ++l) out(l) = cap_w[k + l];
  return out;
}

std::vector<mpc::HorizonSlice> horizon_slices(const Scenario& s,
                                              const thermal::MultiZoneModel& model,
                                              int k, const Eigen::VectorXd& x) {
  const int n = s.zone_count();
  const int p = s.horizon;
  std::vector<mpc::HorizonSlice> slices(n);
  for (int m = 0; m < n; ++m) {
    mpc::HorizonSlice& sl = slices[m];
    sl.y_min.resize(p);
    sl.y_max.resize(p);
    sl.occupied.resize(p);
    sl.price.resize(p);
    sl.disturbance.resize(p);
    for (int l = 0; l < p; ++l) {
      sl.y_min(l) = s.comfort[m].t_min_c[k + 1 + l];
      sl.y_max(l) = s.comfort[m].t_max_c[k + 1 + l];
      sl.occupied(l) = s.comfort[m].occupied[k + 1 + l];
      sl.price(l) = s.price.at(k + l);
      sl.disturbance[l] = model.zones[m].disturbance(
          model.effective_sample(m, s.disturbance[m][k + l], x));
    }
  }
  return slices;
}

double comfort_deviation(double y, double y_min, double y_max) {
  if (std::isfinite(y_min) && y < y_min) return y_min - y;
  if (std::isfinite(y_max) && y > y_max) return y - y_max;
  return 0.0;
}

double comfort_index(const Eigen::MatrixXd& deviation, const Eigen::MatrixXd& occupied,
                     const std::vector<int>& zones, int steps) {
  require(steps >= 1, "steps must be >= 1");
  require(deviation.rows() >= steps && occupied.rows() >= steps,
          "metric inputs shorter than steps");
  require(!zones.empty(), "level has no zones");
  double total = 0.0;
  for (int k = 0; k < steps; ++k) {
    double sum = 0.0;
    int count = 0;
    for (int m : zones) {
      if (occupied(k, m) > 0) {
        sum += std::abs(deviation(k, m));
        ++count;
      }
    }
    if (count > 0) total += sum / count;
  }
  return total / steps;
}

double overall_comfort_index(const std::vector<double>& theta,
                             const std::vector<double>& index_by_level) {
  require(theta.size() == index_by_level.size(), "theta and indices must align");
  double acc = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) {
    acc += theta[i] * index_by_level[i] * index_by_level[i];
  }
  return std::sqrt(acc);
}

SimulationResult run_closed_loop(const Scenario& scenario) {
  scenario.validate();
  const int n = scenario.zone_count();
  const int K = scenario.steps;
  const int p = scenario.horizon;

  const thermal::MultiZoneModel model = scenario.build_model();
  Eigen::VectorXd x = scenario.initial_state();

  SimulationResult res;
  res.strategy = scenario.strategy;
  res.steps = K;
  res.temperature_c.resize(K, n);
  res.input_w.resize(K, n);
  res.allowance_w.resize(K, n);
  res.deviation_c.resize(K, n);
  res.occupied.resize(K, n);
  res.cap_violation_w.resize(K);

  const std::vector<mpc::LocalConfig> cfgs = local_configs(scenario);
  mpc::CentralConfig ccfg = central_config(scenario);
  const qp::Settings settings;

  alloc::OneToOneState chain;
  alloc::MultiToOneState info;
  if (scenario.strategy == Strategy::DistributedOneToOne) {
    chain = alloc::OneToOneState::init(n, scenario.cap_slice(0));
  } else if (scenario.strategy == Strategy::DistributedMultiToOne) {
    info = alloc::MultiToOneState::init(scenario.priorities, scenario.cap_slice(0));
  }

  std::optional<qp::WarmStart> central_warm;
  std::vector<std::optional<qp::WarmStart>> local_warm(n);

  std::mt19937_64 rng(scenario.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd y = model.outputs(x);
    for (int m = 0; m < n; ++m) {
      res.temperature_c(k, m) = y(m);
      res.occupied(k, m) = scenario.comfort[m].occupied[k];
      res.deviation_c(k, m) =
          comfort_deviation(y(m), scenario.comfort[m].t_min_c[k], scenario.comfort[m].t_max_c[k]);
    }

    const std::vector<mpc::HorizonSlice> slices = horizon_slices(scenario, model, k, x);
    Eigen::VectorXd u(n);

    switch (scenario.strategy) {
      case Strategy::Centralized: {
        ccfg.cap = scenario.cap_slice(k);
        const mpc::CentralResult cr =
            mpc::solve_centralized(model, x, slices, ccfg, settings, central_warm);
        if (cr.status == qp::Status::Infeasible) {
          throw std::runtime_error("centralized solve infeasible at step " + std::to_string(k));
        }
        if (cr.status == qp::Status::MaxIterations) ++res.stalled_solves;
        for (int m = 0; m < n; ++m) {
          u(m) = cr.zone_plans[m].input(0);
          res.allowance_w(k, m) = scenario.u_max_w(m);
        }
        central_warm = warm_from(cr.raw);
        break;
      }
      case Strategy::Decentralized: {
        const Eigen::VectorXd cap = scenario.cap_slice(k);
        const std::vector<thermal::Vector9> states = split_states(x, n);
        std::vector<mpc::LocalPlan> plans(n);
        parallel_for(n, scenario.jobs, [&](int m) {
          plans[m] = mpc::solve_decentralized(model.zones[m], states[m], slices[m],
                                              cfgs[m], cap, n, settings, local_warm[m]);
        });
        for (int m = 0; m < n; ++m) {
          if (plans[m].status == qp::Status::Infeasible) {
            throw std::runtime_error("decentralized solve infeasible at step " +
                                     std::to_string(k));
          }
          if (plans[m].status == qp::Status::MaxIterations) ++res.stalled_solves;
          u(m) = plans[m].input(0);
          res.allowance_w(k, m) = cap(0) / n;
          local_warm[m] = warm_from(plans[m].raw);
        }
        break;
      }
      case Strategy::DistributedOneToOne:
      case Strategy::DistributedMultiToOne: {
        const std::vector<thermal::Vector9> states = split_states(x, n);
        alloc::StepInputs in;
        in.zones = model.zones;
        in.states = states;
        in.slices = slices;
        in.configs = cfgs;
        in.cap_now = scenario.cap_slice(k);
        in.cap_next = scenario.cap_slice(k + 1);
        in.qp_settings = settings;
        in.jobs = scenario.jobs;
        in.warm = local_warm;
        const alloc::StepResult sr =
            scenario.strategy == Strategy::DistributedOneToOne
                ? alloc::step_one_to_one(in, chain)
                : alloc::step_multi_to_one(in, scenario.priorities, info);
        for (int m = 0; m < n; ++m) {
          if (sr.plans[m].status == qp::Status::Infeasible) {
            throw std::runtime_error("distributed solve infeasible at step " +
                                     std::to_string(k));
          }
          if (sr.plans[m].status == qp::Status::MaxIterations) ++res.stalled_solves;
          u(m) = sr.applied(m);
          res.allowance_w(k, m) = sr.allowance[m](0);
          local_warm[m] = warm_from(sr.plans[m].raw);
        }
        break;
      }
    }

    res.input_w.row(k) = u.transpose();
    res.cap_violation_w(k) = std::max(0.0, u.sum() - scenario.cap_w[k]);

    std::vector<thermal::DisturbanceSample> samples(n);
    for (int m = 0; m < n; ++m) {
      samples[m] = scenario.disturbance[m][k];
      if (scenario.plant_temp_noise_c > 0) {
        for (int w = 0; w < thermal::kNumWalls; ++w) {
          samples[m].outdoor_temp_c[w] += scenario.plant_temp_noise_c * noise(rng);
        }
      }
    }
    x = model.step(x, u, samples);
  }
  const auto t1 = std::chrono::steady_clock::now();
  res.wall_time_s = std::chrono::duration<double>(t1 - t0).count();

  const int levels = scenario.priorities.num_levels();
  res.comfort_index_by_level.resize(levels);
  res.energy_rate_by_level_w.resize(levels);
  res.energy_cost_by_level.assign(levels, 0.0);
  res.comfort_cost_by_level.assign(levels, 0.0);
  for (int s = 1; s <= levels; ++s) {
    const std::vector<int> zones = scenario.priorities.zones_at(s);
    res.comfort_index_by_level[s - 1] =
        comfort_index(res.deviation_c, res.occupied, zones, K);
    double occupied_usum = 0.0;
    int occupied_count = 0;
    for (int m : zones) {
      for (int k = 0; k < K; ++k) {
        const double uu = res.input_w(k, m);
        if (res.occupied(k, m) > 0) {
          occupied_usum += uu;
          ++occupied_count;
        }
        res.energy_cost_by_level[s - 1] += scenario.price.at(k) * uu * uu;
        res.comfort_cost_by_level[s - 1] +=
            res.occupied(k, m) * res.deviation_c(k, m) * res.deviation_c(k, m);
      }
    }
    res.energy_rate_by_level_w[s - 1] =
        occupied_count > 0 ? occupied_usum / occupied_count : 0.0;
  }
  res.overall_comfort_index =
      overall_comfort_index(scenario.theta_by_level, res.comfort_index_by_level);
  return res;
}

namespace {

struct SingleStepContext {
  thermal::MultiZoneModel model;
  Eigen::VectorXd x;
  alloc::OneToOneState chain;
  alloc::MultiToOneState info;
  std::vector<mpc::HorizonSlice> slices;  // at the evaluation step
  Eigen::VectorXd cap_now;
  int eval_step = 0;
};

// Shared warm-up: run the decentralized controller to the final step, advancing the
// distributed allowance states with the same plans so every strategy is evaluated
// from one common state.
SingleStepContext warm_up(const Scenario& scenario) {
  SingleStepContext ctx;
  ctx.model = scenario.build_model();
  ctx.x = scenario.initial_state();
  const int n = scenario.zone_count();
  ctx.chain = alloc::OneToOneState::init(n, scenario.cap_slice(0));
  ctx.info = alloc::MultiToOneState::init(scenario.priorities, scenario.cap_slice(0));
  ctx.eval_step = scenario.steps - 1;

  const std::vector<mpc::LocalConfig> cfgs = local_configs(scenario);
  const qp::Settings settings;
  std::vector<std::optional<qp::WarmStart>> local_warm(n);

  for (int k = 0; k < ctx.eval_step; ++k) {
    const std::vector<mpc::HorizonSlice> slices = horizon_slices(scenario, ctx.model, k, ctx.x);
    const std::vector<thermal::Vector9> states = split_states(ctx.x, n);
    const Eigen::VectorXd cap = scenario.cap_slice(k);
    std::vector<mpc::LocalPlan> plans(n);
    parallel_for(n, scenario.jobs, [&](int m) {
      plans[m] = mpc::solve_decentralized(ctx.model.zones[m], states[m], slices[m],
                                          cfgs[m], cap, n, settings, local_warm[m]);
    });
    Eigen::VectorXd u(n);
    for (int m = 0; m < n; ++m) {
      u(m) = plans[m].input(0);
      local_warm[m] = warm_from(plans[m].raw);
    }

    const Eigen::VectorXd cap_next = scenario.cap_slice(k + 1);
    Eigen::VectorXd spent = Eigen::VectorXd::Zero(scenario.horizon);
    ctx.chain.residual[0] = cap_next;
    for (int m = 1; m < n; ++m) {
      spent += alloc::shift_forward(plans[m - 1].input);
      ctx.chain.residual[m] = cap_next - spent;
    }
    std::vector<Eigen::VectorXd> shifted(n);
    for (int m = 0; m < n; ++m) shifted[m] = alloc::shift_forward(plans[m].input);
    ctx.info.info = alloc::build_info_matrix(shifted, scenario.priorities, cap_next);

    std::vector<thermal::DisturbanceSample> samples(n);
    for (int m = 0; m < n; ++m) samples[m] = scenario.disturbance[m][k];
    ctx.x = ctx.model.step(ctx.x, u, samples);
  }
  ctx.slices = horizon_slices(scenario, ctx.model, ctx.eval_step, ctx.x);
  ctx.cap_now = scenario.cap_slice(ctx.eval_step);
  return ctx;
}

void append_level_points(std::vector<ParetoPoint>& out, const Scenario& scenario,
                         Strategy strat, double alpha,
                         const std::vector<mpc::LocalPlan>& plans) {
  for (int s = 1; s <= scenario.priorities.num_levels(); ++s) {
    ParetoPoint pt;
    pt.strategy = strat;
    pt.priority = s;
    pt.alpha = alpha;
    for (int m : scenario.priorities.zones_at(s)) {
      pt.energy_cost += plans[m].energy_cost;
      pt.comfort_cost += plans[m].comfort_cost;
    }
    out.push_back(pt);
  }
}

}  // namespace

std::vector<ParetoPoint> pareto_sweep(const Scenario& scenario,
                                      const std::vector<double>& alphas,
                                      const std::vector<Strategy>& strategies,
                                      SweepMode mode) {
  scenario.validate();
  require(!alphas.empty() && !strategies.empty(), "sweep needs alphas and strategies");
  for (double a : alphas) require(a >= 0 && std::isfinite(a), "alpha must be nonnegative");

  std::vector<ParetoPoint> points;

  if (mode == SweepMode::ClosedLoop) {
    for (Strategy strat : strategies) {
      for (double a : alphas) {
        Scenario run = scenario;
        run.strategy = strat;
        run.comfort_weight = a;
        const SimulationResult r = run_closed_loop(run);
        for (int s = 1; s <= scenario.priorities.num_levels(); ++s) {
          points.push_back(ParetoPoint{strat, s, a, r.energy_cost_by_level[s - 1],
                                       r.comfort_cost_by_level[s - 1]});
        }
      }
    }
    return points;
  }

  const SingleStepContext ctx = warm_up(scenario);
  const int n = scenario.zone_count();
  const std::vector<thermal::Vector9> states = split_states(ctx.x, n);
  const qp::Settings settings;

  for (Strategy strat : strategies) {
    for (double a : alphas) {
      std::vector<mpc::LocalConfig> cfgs = local_configs(scenario);
      for (auto& c : cfgs) c.comfort_weight = a;

      std::vector<mpc::LocalPlan> plans(n);
      switch (strat) {
        case Strategy::Centralized: {
          mpc::CentralConfig ccfg = central_config(scenario);
          ccfg.comfort_weight = a;
          ccfg.cap = ctx.cap_now;
          const mpc::CentralResult cr =
              mpc::solve_centralized(ctx.model, ctx.x, ctx.slices, ccfg, settings);
          plans = cr.zone_plans;
          break;
        }
        case Strategy::Decentralized: {
          parallel_for(n, scenario.jobs, [&](int m) {
            plans[m] = mpc::solve_decentralized(ctx.model.zones[m], states[m],
                                                ctx.slices[m], cfgs[m], ctx.cap_now, n,
                                                settings);
          });
          break;
        }
        case Strategy::DistributedOneToOne: {
          parallel_for(n, scenario.jobs, [&](int m) {
            const Eigen::VectorXd allow =
                ctx.chain.residual[m].cwiseMax(0.0).cwiseMin(ctx.cap_now);
            plans[m] = mpc::solve_distributed_local(ctx.model.zones[m], states[m],
                                                    ctx.slices[m], cfgs[m], allow, settings);
          });
          break;
        }
        case Strategy::DistributedMultiToOne: {
          parallel_for(n, scenario.jobs, [&](int m) {
            const Eigen::VectorXd allow = ctx.info.info.allowance_for_level(
                scenario.priorities.level_of_zone[m], ctx.cap_now);
            plans[m] = mpc::solve_distributed_local(ctx.model.zones[m], states[m],
                                                    ctx.slices[m], cfgs[m], allow, settings);
          });
          break;
        }
      }
      append_level_points(points, scenario, strat, a, plans);
    }
  }
  return points;
}

}  // namespace zonempc::sim
