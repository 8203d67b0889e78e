#pragma once

#include "zonempc/mpc.hpp"
#include "zonempc/qp.hpp"
#include "zonempc/thermal.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace zonempc::alloc {

// Advance a planned sequence by one step, duplicating the final entry:
// [a0 a1 ... a_{P-1}] -> [a1 ... a_{P-1} a_{P-1}].
Eigen::VectorXd shift_forward(const Eigen::VectorXd& seq);

// Next allowance handed down a one-to-one chain: what is left of `upstream`
// after the upstream zone's shifted plan, clamped into [0, cap] per entry.
Eigen::VectorXd residual_one_to_one(const Eigen::VectorXd& upstream,
                                    const Eigen::VectorXd& shifted_plan,
                                    const Eigen::VectorXd& cap);

// Zone -> priority level map; levels are 1-based and contiguous (every level
// between 1 and num_levels() has at least one zone).
struct PriorityAssignment {
  std::vector<int> level_of_zone;

  int zone_count() const { return static_cast<int>(level_of_zone.size()); }
  int num_levels() const;
  int count_at(int level) const;
  std::vector<int> zones_at(int level) const;
  void validate() const;

  static PriorityAssignment one_per_zone(int n);
  static PriorityAssignment single_level(int n);
};

// Row s holds the per-zone allowance of priority level s+1 over the next horizon,
// kept unclamped so the bookkeeping telescopes exactly; clamping happens on read.
struct InfoMatrix {
  Eigen::MatrixXd rows;  // num_levels x P

  Eigen::VectorXd allowance_for_level(int level, const Eigen::VectorXd& cap) const;
};

// rows(0) = cap / N_1; rows(s) = (cap - sum of shifted plans of levels <= s) / N_{s+1}.
// `shifted_plans` must hold one shifted plan per zone, each of length cap.size().
InfoMatrix build_info_matrix(std::span<const Eigen::VectorXd> shifted_plans,
                             const PriorityAssignment& assignment,
                             const Eigen::VectorXd& cap);

// Coordinator state for the chain of singleton priorities (zone index == rank).
// residual[m] is the unclamped allowance of zone m over the current horizon.
struct OneToOneState {
  std::vector<Eigen::VectorXd> residual;

  static OneToOneState init(int zone_count, const Eigen::VectorXd& cap0);
};

struct MultiToOneState {
  InfoMatrix info;

  static MultiToOneState init(const PriorityAssignment& assignment,
                              const Eigen::VectorXd& cap0);
};

struct StepInputs {
  std::span<const thermal::DiscreteZoneModel> zones;
  std::span<const thermal::Vector9> states;
  std::span<const mpc::HorizonSlice> slices;
  std::span<const mpc::LocalConfig> configs;  // one per zone, equal horizons
  Eigen::VectorXd cap_now;   // cap over steps [k, k+P)
  Eigen::VectorXd cap_next;  // cap over steps [k+1, k+1+P)
  qp::Settings qp_settings;
  int jobs = 1;
  std::span<const std::optional<qp::WarmStart>> warm = {};

  int horizon() const;
};

struct StepResult {
  Eigen::VectorXd applied;                  // first planned input per zone
  std::vector<mpc::LocalPlan> plans;
  std::vector<Eigen::VectorXd> allowance;   // clamped allowance each zone solved against
};

// All zones solve concurrently against allowances computed at the end of the
// previous step; the state is then advanced for step k+1.
StepResult step_one_to_one(const StepInputs& in, OneToOneState& state);
StepResult step_multi_to_one(const StepInputs& in, const PriorityAssignment& assignment,
                             MultiToOneState& state);

}  // namespace zonempc::alloc
