#pragma once

#include "zonempc/qp.hpp"
#include "zonempc/thermal.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace zonempc::mpc {

// Per-step electricity price, currency per kWh. Only relative magnitudes matter
// to the controllers; the published time-of-use tariff gives the defaults.
struct PriceSchedule {
  std::vector<double> per_step;

  static PriceSchedule shenzhen_time_of_use(int steps, double dt_s, double start_hour = 0.0);
  double at(int k) const;
  int size() const { return static_cast<int>(per_step.size()); }
  void validate() const;
};

// Comfort band and occupancy per step for one zone; +-infinity disables a side.
struct ComfortSchedule {
  std::vector<double> t_min_c;
  std::vector<double> t_max_c;
  std::vector<double> occupied;  // 0 or 1

  int size() const { return static_cast<int>(t_min_c.size()); }
  void validate() const;
};

// Everything a controller needs about steps k..k+P when deciding at step k:
// bands/occupancy for predicted outputs k+1..k+P, prices for inputs k..k+P-1,
// and the discrete-time disturbance vectors entering those input steps.
struct HorizonSlice {
  Eigen::VectorXd y_min;    // P
  Eigen::VectorXd y_max;    // P
  Eigen::VectorXd occupied; // P
  Eigen::VectorXd price;    // P
  std::vector<thermal::Vector9> disturbance;  // P

  void validate(int horizon) const;
};

// Quadratic stage weights: energy_cost = sum u_l^2 uw_l, comfort_cost = sum v_l^2 vw_l,
// where vw already carries the comfort weight alpha. comfort_raw drops alpha.
struct CostTerms {
  Eigen::VectorXd u_weight;
  Eigen::VectorXd v_weight;
  Eigen::VectorXd occupancy;

  double energy_cost(const Eigen::VectorXd& u) const;
  double comfort_cost(const Eigen::VectorXd& v) const;
  double comfort_raw(const Eigen::VectorXd& v) const;
  double total(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
};

CostTerms build_cost_terms(const HorizonSlice& slice, double comfort_weight);

// Affine map from the input sequence to predicted outputs: y = free + gain * u.
struct PredictionMap {
  Eigen::VectorXd free;
  Eigen::MatrixXd gain;
};

PredictionMap build_prediction(const thermal::DiscreteZoneModel& zone,
                               const thermal::Vector9& x0,
                               std::span<const thermal::Vector9> disturbance, int horizon);

// Stacked variant; rows are zone-major (zone 0 steps 1..P, then zone 1, ...).
PredictionMap build_prediction(const thermal::MultiZoneModel& model,
                               const Eigen::VectorXd& x0,
                               std::span<const Eigen::VectorXd> disturbance, int horizon);

struct LocalConfig {
  int horizon = 8;
  double comfort_weight = 1e5;  // alpha
  double u_min = 0.0;
  double u_max = 1500.0;
};

struct LocalPlan {
  Eigen::VectorXd input;             // u(k..k+P-1)
  Eigen::VectorXd slack;             // v(k+1..k+P)
  Eigen::VectorXd predicted_output;  // y(k+1..k+P)
  double objective = 0.0;            // energy_cost + alpha-weighted comfort cost
  double energy_cost = 0.0;          // sum of price * u^2
  double comfort_cost = 0.0;         // sum of occupancy * v^2, alpha not applied
  qp::Status status = qp::Status::MaxIterations;
  qp::Solution raw;                  // underlying QP solution, usable as a warm start
};

// One zone optimizing against a per-step energy allowance (distributed building block).
LocalPlan solve_distributed_local(const thermal::DiscreteZoneModel& zone,
                                  const thermal::Vector9& x0, const HorizonSlice& slice,
                                  const LocalConfig& cfg, const Eigen::VectorXd& allowance,
                                  const qp::Settings& settings = {},
                                  const std::optional<qp::WarmStart>& warm = std::nullopt);

// Static equal split of the cap: allowance = cap_slice / zone_count.
LocalPlan solve_decentralized(const thermal::DiscreteZoneModel& zone,
                              const thermal::Vector9& x0, const HorizonSlice& slice,
                              const LocalConfig& cfg, const Eigen::VectorXd& cap_slice,
                              int zone_count, const qp::Settings& settings = {},
                              const std::optional<qp::WarmStart>& warm = std::nullopt);

struct CentralConfig {
  int horizon = 8;
  double comfort_weight = 1e5;
  Eigen::VectorXd priority_weight;  // theta, one entry per zone
  Eigen::VectorXd u_min;            // per zone
  Eigen::VectorXd u_max;            // per zone
  Eigen::VectorXd cap;              // total power bound per step, size >= P
};

struct CentralResult {
  std::vector<LocalPlan> zone_plans;
  double objective = 0.0;  // sum over zones of theta_m * plan objective
  qp::Status status = qp::Status::MaxIterations;
  qp::Solution raw;
};

CentralResult solve_centralized(const thermal::MultiZoneModel& model,
                                const Eigen::VectorXd& x0,
                                std::span<const HorizonSlice> slices,
                                const CentralConfig& cfg,
                                const qp::Settings& settings = {},
                                const std::optional<qp::WarmStart>& warm = std::nullopt);

}  // namespace zonempc::mpc
