#include "zonempc/allocation.hpp"

#include "zonempc/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace zonempc::alloc {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_step_inputs(const StepInputs& in) {
  const int n = static_cast<int>(in.zones.size());
  require(n >= 1, "at least one zone required");
  require(static_cast<int>(in.states.size()) == n, "one state per zone required");
  require(static_cast<int>(in.slices.size()) == n, "one horizon slice per zone required");
  require(static_cast<int>(in.configs.size()) == n, "one config per zone required");
  const int p = in.configs[0].horizon;
  for (const auto& cfg : in.configs) {
    require(cfg.horizon == p, "all zones must share one horizon");
  }
  require(in.cap_now.size() == p, "cap_now must cover the horizon");
  require(in.cap_next.size() == p, "cap_next must cover the horizon");
  require(in.cap_now.minCoeff() >= 0 && in.cap_next.minCoeff() >= 0,
          "caps must be nonnegative");
  require(in.warm.empty() || static_cast<int>(in.warm.size()) == n,
          "warm starts must be absent or one per zone");
}

std::vector<mpc::LocalPlan> solve_all(const StepInputs& in,
                                      const std::vector<Eigen::VectorXd>& allowance) {
  const int n = static_cast<int>(in.zones.size());
  std::vector<mpc::LocalPlan> plans(n);
  parallel_for(n, in.jobs, [&](int m) {
    const std::optional<qp::WarmStart> warm =
        in.warm.empty() ? std::nullopt : in.warm[m];
    plans[m] = mpc::solve_distributed_local(in.zones[m], in.states[m], in.slices[m],
                                            in.configs[m], allowance[m], in.qp_settings,
                                            warm);
  });
  return plans;
}

StepResult make_result(const StepInputs& in, std::vector<mpc::LocalPlan> plans,
                       std::vector<Eigen::VectorXd> allowance) {
  const int n = static_cast<int>(in.zones.size());
  StepResult res;
  res.applied.resize(n);
  for (int m = 0; m < n; ++m) res.applied(m) = plans[m].input(0);
  res.plans = std::move(plans);
  res.allowance = std::move(allowance);
  return res;
}

}  // namespace

int StepInputs::horizon() const {
  require(!configs.empty(), "configs must not be empty");
  return configs[0].horizon;
}

Eigen::VectorXd shift_forward(const Eigen::VectorXd& seq) {
  require(seq.size() >= 2, "shift_forward needs at least two entries");
  Eigen::VectorXd out(seq.size());
  out.head(seq.size() - 1) = seq.tail(seq.size() - 1);
  out(seq.size() - 1) = seq(seq.size() - 1);
  return out;
}

Eigen::VectorXd residual_one_to_one(const Eigen::VectorXd& upstream,
                                    const Eigen::VectorXd& shifted_plan,
                                    const Eigen::VectorXd& cap) {
  require(upstream.size() == shifted_plan.size() && upstream.size() == cap.size(),
          "residual inputs must have equal length");
  return (upstream - shifted_plan).cwiseMax(0.0).cwiseMin(cap);
}

int PriorityAssignment::num_levels() const {
  int max_level = 0;
  for (int l : level_of_zone) max_level = std::max(max_level, l);
  return max_level;
}

int PriorityAssignment::count_at(int level) const {
  return static_cast<int>(std::count(level_of_zone.begin(), level_of_zone.end(), level));
}

std::vector<int> PriorityAssignment::zones_at(int level) const {
  std::vector<int> out;
  for (int m = 0; m < zone_count(); ++m) {
    if (level_of_zone[m] == level) out.push_back(m);
  }
  return out;
}

void PriorityAssignment::validate() const {
  require(zone_count() >= 1, "assignment must cover at least one zone");
  const int levels = num_levels();
  require(levels >= 1, "priority levels are 1-based");
  for (int l : level_of_zone) require(l >= 1 && l <= levels, "priority level out of range");
  for (int s = 1; s <= levels; ++s) {
    require(count_at(s) > 0, "priority levels must be contiguous");
  }
}

PriorityAssignment PriorityAssignment::one_per_zone(int n) {
  PriorityAssignment pa;
  pa.level_of_zone.resize(n);
  for (int m = 0; m < n; ++m) pa.level_of_zone[m] = m + 1;
  return pa;
}

PriorityAssignment PriorityAssignment::single_level(int n) {
  PriorityAssignment pa;
  pa.level_of_zone.assign(n, 1);
  return pa;
}

Eigen::VectorXd InfoMatrix::allowance_for_level(int level, const Eigen::VectorXd& cap) const {
  require(level >= 1 && level <= rows.rows(), "priority level out of range");
  require(cap.size() == rows.cols(), "cap length mismatch");
  return rows.row(level - 1).transpose().cwiseMax(0.0).cwiseMin(cap);
}

InfoMatrix build_info_matrix(std::span<const Eigen::VectorXd> shifted_plans,
                             const PriorityAssignment& assignment,
                             const Eigen::VectorXd& cap) {
  assignment.validate();
  const int n = assignment.zone_count();
  const int levels = assignment.num_levels();
  const int p = static_cast<int>(cap.size());
  require(static_cast<int>(shifted_plans.size()) == n, "one shifted plan per zone required");
  for (const auto& plan : shifted_plans) {
    require(plan.size() == p, "shifted plan length must match cap length");
  }

  InfoMatrix info;
  info.rows.resize(levels, p);
  Eigen::VectorXd spent = Eigen::VectorXd::Zero(p);
  for (int s = 1; s <= levels; ++s) {
    info.rows.row(s - 1) = (cap - spent).transpose() / assignment.count_at(s);
    if (s < levels) {
      for (int m = 0; m < n; ++m) {
        if (assignment.level_of_zone[m] == s) spent += shifted_plans[m];
      }
    }
  }
  return info;
}

OneToOneState OneToOneState::init(int zone_count, const Eigen::VectorXd& cap0) {
  require(zone_count >= 1, "at least one zone required");
  OneToOneState st;
  st.residual.resize(zone_count);
  st.residual[0] = cap0;
  for (int m = 1; m < zone_count; ++m) st.residual[m] = cap0 / zone_count;
  return st;
}

MultiToOneState MultiToOneState::init(const PriorityAssignment& assignment,
                                      const Eigen::VectorXd& cap0) {
  assignment.validate();
  MultiToOneState st;
  const int levels = assignment.num_levels();
  st.info.rows.resize(levels, cap0.size());
  for (int s = 1; s <= levels; ++s) {
    st.info.rows.row(s - 1) = cap0.transpose() / assignment.count_at(s);
  }
  return st;
}

StepResult step_one_to_one(const StepInputs& in, OneToOneState& state) {
  check_step_inputs(in);
  const int n = static_cast<int>(in.zones.size());
  const int p = in.horizon();
  require(static_cast<int>(state.residual.size()) == n, "state zone count mismatch");

  std::vector<Eigen::VectorXd> allowance(n);
  for (int m = 0; m < n; ++m) {
    require(state.residual[m].size() == p, "state horizon mismatch");
    allowance[m] = state.residual[m].cwiseMax(0.0).cwiseMin(in.cap_now);
  }

  std::vector<mpc::LocalPlan> plans = solve_all(in, allowance);

  // Advance the chain: zone m+1 receives what zones 0..m are not planning to use.
  // The running sum keeps the arithmetic identical to the grouped bookkeeping.
  Eigen::VectorXd spent = Eigen::VectorXd::Zero(p);
  state.residual[0] = in.cap_next;
  for (int m = 1; m < n; ++m) {
    spent += shift_forward(plans[m - 1].input);
    state.residual[m] = in.cap_next - spent;
  }
  return make_result(in, std::move(plans), std::move(allowance));
}

StepResult step_multi_to_one(const StepInputs& in, const PriorityAssignment& assignment,
                             MultiToOneState& state) {
  check_step_inputs(in);
  assignment.validate();
  const int n = static_cast<int>(in.zones.size());
  require(assignment.zone_count() == n, "assignment zone count mismatch");
  require(state.info.rows.rows() == assignment.num_levels(), "state level count mismatch");
  require(state.info.rows.cols() == in.horizon(), "state horizon mismatch");

  std::vector<Eigen::VectorXd> allowance(n);
  for (int m = 0; m < n; ++m) {
    allowance[m] =
        state.info.allowance_for_level(assignment.level_of_zone[m], in.cap_now);
  }

  std::vector<mpc::LocalPlan> plans = solve_all(in, allowance);

  std::vector<Eigen::VectorXd> shifted(n);
  for (int m = 0; m < n; ++m) shifted[m] = shift_forward(plans[m].input);
  state.info = build_info_matrix(shifted, assignment, in.cap_next);
  return make_result(in, std::move(plans), std::move(allowance));
}

}  // namespace zonempc::alloc
