#pragma once

#include "zonempc/allocation.hpp"
#include "zonempc/mpc.hpp"
#include "zonempc/thermal.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace zonempc::sim {

enum class Strategy {
  Centralized,
  Decentralized,
  DistributedOneToOne,
  DistributedMultiToOne,
};

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& name);  // throws on unknown name

// Fully materialized problem instance: models, schedules and solver knobs for a run.
// Schedules must cover steps + horizon entries so every horizon slice is defined.
struct Scenario {
  std::string name;
  double dt_s = 900.0;
  int steps = 0;
  int horizon = 8;
  double comfort_weight = 1e5;  // alpha
  std::vector<double> theta_by_level;
  alloc::PriorityAssignment priorities;
  Eigen::VectorXd u_min_w, u_max_w;  // per zone
  thermal::HvacMode mode = thermal::HvacMode::Cooling;
  std::vector<thermal::ZoneThermalParams> zone_params;
  std::vector<std::array<int, thermal::kNumWalls>> adjacency;
  std::vector<mpc::ComfortSchedule> comfort;             // per zone
  mpc::PriceSchedule price;
  std::vector<double> cap_w;                             // per step
  std::vector<std::vector<thermal::DisturbanceSample>> disturbance;  // [zone][step]
  Eigen::VectorXd initial_zone_temp_c;                   // per zone
  Strategy strategy = Strategy::DistributedMultiToOne;
  std::uint64_t seed = 0;
  int jobs = 1;
  double plant_temp_noise_c = 0.0;  // std dev of noise on plant-side outdoor temps

  int zone_count() const { return static_cast<int>(zone_params.size()); }
  void validate() const;
  thermal::MultiZoneModel build_model() const;
  Eigen::VectorXd initial_state() const;           // every node starts at the zone temp
  Eigen::VectorXd cap_slice(int k) const;          // cap over [k, k+P)
};

// Controller view of steps k..k+P for every zone; neighbour temperatures behind
// interior walls are frozen at the measured state x.
std::vector<mpc::HorizonSlice> horizon_slices(const Scenario& s,
                                              const thermal::MultiZoneModel& model,
                                              int k, const Eigen::VectorXd& x);

struct SimulationResult {
  Strategy strategy = Strategy::Centralized;
  int steps = 0;
  // steps x zones; row k holds the values the controller saw and applied at step k
  Eigen::MatrixXd temperature_c;
  Eigen::MatrixXd input_w;
  Eigen::MatrixXd allowance_w;
  Eigen::MatrixXd deviation_c;
  Eigen::MatrixXd occupied;
  Eigen::VectorXd cap_violation_w;  // per step, max(0, sum of inputs - cap)
  std::vector<double> comfort_index_by_level;
  double overall_comfort_index = 0.0;
  std::vector<double> energy_rate_by_level_w;   // mean applied power over occupied steps
  std::vector<double> energy_cost_by_level;     // sum of price * u^2
  std::vector<double> comfort_cost_by_level;    // sum of occupied * deviation^2
  double wall_time_s = 0.0;
  int stalled_solves = 0;  // solves that stopped at the iteration limit
};

SimulationResult run_closed_loop(const Scenario& scenario);

// Piecewise distance to the comfort band, zero inside or on an infinite side.
double comfort_deviation(double y, double y_min, double y_max);

// Sum over occupied steps of the level's mean absolute deviation, divided by the
// total number of steps (unoccupied steps dilute the index rather than dropping out).
double comfort_index(const Eigen::MatrixXd& deviation, const Eigen::MatrixXd& occupied,
                     const std::vector<int>& zones, int steps);

// Root of the theta-weighted sum of squared per-level indices.
double overall_comfort_index(const std::vector<double>& theta,
                             const std::vector<double>& index_by_level);

struct ParetoPoint {
  Strategy strategy = Strategy::Centralized;
  int priority = 1;
  double alpha = 0.0;
  double energy_cost = 0.0;
  double comfort_cost = 0.0;
};

enum class SweepMode { ClosedLoop, SingleStep };

// Closed-loop mode re-runs the whole scenario per (strategy, alpha) and reports
// realized per-level costs. Single-step mode drives a shared decentralized warm-up
// to the final step and reports the planned per-level costs of that one decision.
std::vector<ParetoPoint> pareto_sweep(const Scenario& scenario,
                                      const std::vector<double>& alphas,
                                      const std::vector<Strategy>& strategies,
                                      SweepMode mode);

}  // namespace zonempc::sim
