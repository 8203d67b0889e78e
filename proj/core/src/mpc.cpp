#include "zonempc/mpc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace zonempc::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// One zone's contribution to a strategy QP over variables [u(P); v(P)].
struct ZoneAssembly {
  Eigen::VectorXd h_diag;      // 2P
  Eigen::MatrixXd comfort;     // rows over [u; v]
  Eigen::VectorXd comfort_rhs;
  Eigen::VectorXd lb, ub;      // 2P
  PredictionMap pred;
  CostTerms cost;
};

ZoneAssembly assemble_zone(const thermal::DiscreteZoneModel& zone,
                           const thermal::Vector9& x0, const HorizonSlice& slice,
                           int horizon, double comfort_weight, double u_min, double u_max,
                           const Eigen::VectorXd& u_upper) {
  const int p = horizon;
  ZoneAssembly za;
  za.pred = build_prediction(zone, x0, slice.disturbance, p);
  za.cost = build_cost_terms(slice, comfort_weight);

  za.h_diag.resize(2 * p);
  za.h_diag.head(p) = 2.0 * za.cost.u_weight;
  za.h_diag.tail(p) = 2.0 * za.cost.v_weight;

  int rows = 0;
  for (int l = 0; l < p; ++l) {
    if (std::isfinite(slice.y_max(l))) ++rows;
    if (std::isfinite(slice.y_min(l))) ++rows;
  }
  za.comfort = Eigen::MatrixXd::Zero(rows, 2 * p);
  za.comfort_rhs.resize(rows);
  int r = 0;
  for (int l = 0; l < p; ++l) {
    if (std::isfinite(slice.y_max(l))) {
      za.comfort.block(r, 0, 1, p) = za.pred.gain.row(l);
      za.comfort(r, p + l) = -1.0;
      za.comfort_rhs(r) = slice.y_max(l) - za.pred.free(l);
      ++r;
    }
    if (std::isfinite(slice.y_min(l))) {
      za.comfort.block(r, 0, 1, p) = -za.pred.gain.row(l);
      za.comfort(r, p + l) = -1.0;
      za.comfort_rhs(r) = za.pred.free(l) - slice.y_min(l);
      ++r;
    }
  }

  za.lb.resize(2 * p);
  za.ub.resize(2 * p);
  for (int l = 0; l < p; ++l) {
    const double cap_l = std::max(u_upper(l), 0.0);
    za.ub(l) = std::min(u_max, cap_l);
    za.lb(l) = std::min(u_min, za.ub(l));
  }
  za.lb.tail(p).setZero();
  za.ub.tail(p).setConstant(kInf);
  return za;
}

LocalPlan extract_plan(const ZoneAssembly& za, const qp::Solution& raw, int p) {
  LocalPlan plan;
  plan.raw = raw;
  plan.status = raw.status;
  plan.input = raw.primal.head(p).cwiseMax(za.lb.head(p)).cwiseMin(za.ub.head(p));
  plan.slack = raw.primal.tail(p).cwiseMax(0.0);
  plan.predicted_output = za.pred.free + za.pred.gain * plan.input;
  plan.objective = za.cost.total(plan.input, plan.slack);
  plan.energy_cost = za.cost.energy_cost(plan.input);
  plan.comfort_cost = za.cost.comfort_raw(plan.slack);
  return plan;
}

}  // namespace

PriceSchedule PriceSchedule::shenzhen_time_of_use(int steps, double dt_s, double start_hour) {
  require(steps > 0 && dt_s > 0, "steps and dt_s must be positive");
  PriceSchedule ps;
  ps.per_step.resize(steps);
  for (int k = 0; k < steps; ++k) {
    const double h = std::fmod(start_hour + k * dt_s / 3600.0, 24.0);
    double rate;
    if (h < 8.0) {
      rate = 0.3358;
    } else if (h < 14.0) {
      rate = 0.6629;
    } else if (h < 17.0) {
      rate = 1.0881;
    } else if (h < 19.0) {
      rate = 0.6629;
    } else if (h < 22.0) {
      rate = 1.0881;
    } else {
      rate = 0.6629;
    }
    ps.per_step[k] = rate;
  }
  return ps;
}

double PriceSchedule::at(int k) const {
  require(k >= 0 && k < size(), "price index out of range");
  return per_step[k];
}

void PriceSchedule::validate() const {
  for (double p : per_step) require(p > 0 && std::isfinite(p), "prices must be positive");
}

void ComfortSchedule::validate() const {
  require(t_max_c.size() == t_min_c.size() && occupied.size() == t_min_c.size(),
          "comfort schedule arrays must have equal length");
  for (size_t i = 0; i < t_min_c.size(); ++i) {
    require(!std::isnan(t_min_c[i]) && !std::isnan(t_max_c[i]), "comfort bounds NaN");
    if (std::isfinite(t_min_c[i]) && std::isfinite(t_max_c[i])) {
      require(t_min_c[i] <= t_max_c[i], "comfort band inverted");
    }
    require(occupied[i] == 0.0 || occupied[i] == 1.0, "occupancy must be 0 or 1");
  }
}

void HorizonSlice::validate(int horizon) const {
  require(horizon >= 1, "horizon must be >= 1");
  require(y_min.size() == horizon && y_max.size() == horizon, "band slice length mismatch");
  require(occupied.size() == horizon && price.size() == horizon, "slice length mismatch");
  require(static_cast<int>(disturbance.size()) == horizon, "disturbance slice length mismatch");
  for (int l = 0; l < horizon; ++l) {
    require(occupied(l) == 0.0 || occupied(l) == 1.0, "occupancy must be 0 or 1");
    require(price(l) > 0 && std::isfinite(price(l)), "prices must be positive");
  }
}

double CostTerms::energy_cost(const Eigen::VectorXd& u) const {
  return u.cwiseProduct(u).dot(u_weight);
}

double CostTerms::comfort_cost(const Eigen::VectorXd& v) const {
  return v.cwiseProduct(v).dot(v_weight);
}

double CostTerms::comfort_raw(const Eigen::VectorXd& v) const {
  return v.cwiseProduct(v).dot(occupancy);
}

double CostTerms::total(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return energy_cost(u) + comfort_cost(v);
}

CostTerms build_cost_terms(const HorizonSlice& slice, double comfort_weight) {
  require(comfort_weight >= 0 && std::isfinite(comfort_weight),
          "comfort_weight must be nonnegative");
  CostTerms ct;
  ct.u_weight = slice.price;
  ct.v_weight = comfort_weight * slice.occupied;
  ct.occupancy = slice.occupied;
  return ct;
}

PredictionMap build_prediction(const thermal::DiscreteZoneModel& zone,
                               const thermal::Vector9& x0,
                               std::span<const thermal::Vector9> disturbance, int horizon) {
  require(horizon >= 1, "horizon must be >= 1");
  require(static_cast<int>(disturbance.size()) >= horizon,
          "need one disturbance vector per horizon step");

  PredictionMap pm;
  pm.free.resize(horizon);
  pm.gain = Eigen::MatrixXd::Zero(horizon, horizon);

  thermal::Vector9 s = x0;
  for (int l = 0; l < horizon; ++l) {
    s = zone.a * s + disturbance[l];
    pm.free(l) = s(0);
  }

  // impulse response of the output: g(i) = C A^i B
  Eigen::Matrix<double, 1, thermal::kStateDim> row = thermal::DiscreteZoneModel::output_row();
  Eigen::VectorXd g(horizon);
  for (int i = 0; i < horizon; ++i) {
    g(i) = row * zone.b;
    row = row * zone.a;
  }
  for (int l = 0; l < horizon; ++l) {
    for (int j = 0; j <= l; ++j) pm.gain(l, j) = g(l - j);
  }
  return pm;
}

PredictionMap build_prediction(const thermal::MultiZoneModel& model,
                               const Eigen::VectorXd& x0,
                               std::span<const Eigen::VectorXd> disturbance, int horizon) {
  const int n = model.zone_count();
  require(x0.size() == model.state_dim(), "state dimension mismatch");
  require(static_cast<int>(disturbance.size()) >= horizon,
          "need one disturbance vector per horizon step");

  PredictionMap pm;
  pm.free.resize(n * horizon);
  pm.gain = Eigen::MatrixXd::Zero(n * horizon, n * horizon);
  std::vector<thermal::Vector9> dz(horizon);
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < horizon; ++l) {
      require(disturbance[l].size() == model.state_dim(), "disturbance dimension mismatch");
      dz[l] = disturbance[l].segment<thermal::kStateDim>(m * thermal::kStateDim);
    }
    const PredictionMap sub = build_prediction(
        model.zones[m], x0.segment<thermal::kStateDim>(m * thermal::kStateDim), dz, horizon);
    pm.free.segment(m * horizon, horizon) = sub.free;
    pm.gain.block(m * horizon, m * horizon, horizon, horizon) = sub.gain;
  }
  return pm;
}

LocalPlan solve_distributed_local(const thermal::DiscreteZoneModel& zone,
                                  const thermal::Vector9& x0, const HorizonSlice& slice,
                                  const LocalConfig& cfg, const Eigen::VectorXd& allowance,
                                  const qp::Settings& settings,
                                  const std::optional<qp::WarmStart>& warm) {
  const int p = cfg.horizon;
  slice.validate(p);
  require(allowance.size() >= p, "allowance must cover the horizon");
  require(cfg.u_min <= cfg.u_max, "u_min must not exceed u_max");

  const ZoneAssembly za = assemble_zone(zone, x0, slice, p, cfg.comfort_weight,
                                        cfg.u_min, cfg.u_max, allowance.head(p));
  qp::Problem prob;
  prob.hessian = za.h_diag.asDiagonal();
  prob.linear = Eigen::VectorXd::Zero(2 * p);
  prob.ineq = za.comfort;
  prob.ineq_rhs = za.comfort_rhs;
  prob.lower = za.lb;
  prob.upper = za.ub;

  const qp::Solution raw = qp::solve(prob, settings, warm);
  return extract_plan(za, raw, p);
}

LocalPlan solve_decentralized(const thermal::DiscreteZoneModel& zone,
                              const thermal::Vector9& x0, const HorizonSlice& slice,
                              const LocalConfig& cfg, const Eigen::VectorXd& cap_slice,
                              int zone_count, const qp::Settings& settings,
                              const std::optional<qp::WarmStart>& warm) {
  require(zone_count >= 1, "zone_count must be >= 1");
  require(cap_slice.size() >= cfg.horizon, "cap slice must cover the horizon");
  const Eigen::VectorXd allowance = cap_slice.head(cfg.horizon) / zone_count;
  return solve_distributed_local(zone, x0, slice, cfg, allowance, settings, warm);
}

CentralResult solve_centralized(const thermal::MultiZoneModel& model,
                                const Eigen::VectorXd& x0,
                                std::span<const HorizonSlice> slices,
                                const CentralConfig& cfg,
                                const qp::Settings& settings,
                                const std::optional<qp::WarmStart>& warm) {
  const int n = model.zone_count();
  const int p = cfg.horizon;
  require(static_cast<int>(slices.size()) == n, "one horizon slice per zone required");
  require(cfg.priority_weight.size() == n, "one priority weight per zone required");
  require(cfg.u_min.size() == n && cfg.u_max.size() == n, "per-zone input bounds required");
  require(cfg.cap.size() >= p, "cap must cover the horizon");
  for (int m = 0; m < n; ++m) {
    require(cfg.priority_weight(m) > 0, "priority weights must be positive");
    require(cfg.u_min(m) <= cfg.u_max(m), "u_min must not exceed u_max");
  }

  std::vector<ZoneAssembly> zas;
  zas.reserve(n);
  const Eigen::VectorXd unlimited = Eigen::VectorXd::Constant(p, kInf);
  int comfort_rows = 0;
  for (int m = 0; m < n; ++m) {
    slices[m].validate(p);
    zas.push_back(assemble_zone(model.zones[m],
                                x0.segment<thermal::kStateDim>(m * thermal::kStateDim),
                                slices[m], p, cfg.comfort_weight, cfg.u_min(m),
                                cfg.u_max(m), unlimited));
    comfort_rows += static_cast<int>(zas.back().comfort.rows());
  }

  const int nv = 2 * p * n;
  qp::Problem prob;
  prob.hessian = Eigen::MatrixXd::Zero(nv, nv);
  prob.linear = Eigen::VectorXd::Zero(nv);
  prob.ineq = Eigen::MatrixXd::Zero(comfort_rows + p, nv);
  prob.ineq_rhs.resize(comfort_rows + p);
  prob.lower.resize(nv);
  prob.upper.resize(nv);

  int r = 0;
  for (int m = 0; m < n; ++m) {
    const int off = 2 * p * m;
    prob.hessian.block(off, off, 2 * p, 2 * p) =
        (cfg.priority_weight(m) * zas[m].h_diag).asDiagonal();
    const int rows = static_cast<int>(zas[m].comfort.rows());
    prob.ineq.block(r, off, rows, 2 * p) = zas[m].comfort;
    prob.ineq_rhs.segment(r, rows) = zas[m].comfort_rhs;
    r += rows;
    prob.lower.segment(off, 2 * p) = zas[m].lb;
    prob.upper.segment(off, 2 * p) = zas[m].ub;
  }
  for (int l = 0; l < p; ++l) {
    for (int m = 0; m < n; ++m) prob.ineq(r + l, 2 * p * m + l) = 1.0;
    prob.ineq_rhs(r + l) = cfg.cap(l);
  }

  const qp::Solution raw = qp::solve(prob, settings, warm);

  CentralResult result;
  result.raw = raw;
  result.status = raw.status;
  result.zone_plans.reserve(n);
  result.objective = 0.0;
  for (int m = 0; m < n; ++m) {
    const int off = 2 * p * m;
    qp::Solution piece;
    piece.status = raw.status;
    piece.primal = raw.primal.segment(off, 2 * p);
    piece.dual = Eigen::VectorXd::Zero(0);
    LocalPlan plan = extract_plan(zas[m], piece, p);
    plan.raw = qp::Solution{};  // per-zone slice of a joint solve has no standalone dual
    plan.status = raw.status;
    result.objective += cfg.priority_weight(m) * plan.objective;
    result.zone_plans.push_back(std::move(plan));
  }
  return result;
}

}  // namespace zonempc::mpc
