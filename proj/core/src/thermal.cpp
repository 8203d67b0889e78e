#include "zonempc/thermal.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>

namespace zonempc::thermal {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool all_positive_finite(const std::array<double, kNumWalls>& v) {
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

ZoneThermalParams ZoneThermalParams::reference_office() {
  ZoneThermalParams p;
  // north, east, west, south
  p.r_inside = {0.0310, 0.0232, 0.0232, 0.0310};
  p.r_wall = {0.0238, 0.0179, 0.0179, 0.0238};
  p.r_outside = {0.0116, 0.0087, 0.0087, 0.0116};
  p.c_wall = {8.5e5, 1.1e6, 1.1e6, 8.5e5};
  p.c_zone = 4.8e4;
  return p;
}

void ZoneThermalParams::validate() const {
  require(all_positive_finite(r_inside), "r_inside must be positive and finite");
  require(all_positive_finite(r_wall), "r_wall must be positive and finite");
  require(all_positive_finite(r_outside), "r_outside must be positive and finite");
  require(all_positive_finite(c_wall), "c_wall must be positive and finite");
  require(c_zone > 0.0 && std::isfinite(c_zone), "c_zone must be positive and finite");
}

void DisturbanceSample::validate() const {
  for (double t : outdoor_temp_c) {
    require(std::isfinite(t), "outdoor_temp_c must be finite");
  }
  for (double q : wall_solar_w) {
    require(q >= 0.0 && std::isfinite(q), "wall_solar_w must be nonnegative");
  }
  require(internal_gain_w >= 0.0 && std::isfinite(internal_gain_w),
          "internal_gain_w must be nonnegative");
  require(zone_solar_w >= 0.0 && std::isfinite(zone_solar_w),
          "zone_solar_w must be nonnegative");
}

Vector9 ContinuousZoneModel::disturbance(const DisturbanceSample& s) const {
  s.validate();
  Vector9 d = Vector9::Zero();
  d(0) = (s.internal_gain_w + s.zone_solar_w) / params.c_zone;
  for (int w = 0; w < kNumWalls; ++w) {
    d(5 + w) = s.outdoor_temp_c[w] / (params.c_wall[w] * params.r_outside[w]) +
               s.wall_solar_w[w] / params.c_wall[w];
  }
  return d;
}

ContinuousZoneModel build_zone_matrices(const ZoneThermalParams& params) {
  params.validate();
  ContinuousZoneModel m;
  m.params = params;

  double total_conductance = 0.0;
  for (int w = 0; w < kNumWalls; ++w) total_conductance += 1.0 / params.r_inside[w];

  m.a(0, 0) = -total_conductance / params.c_zone;
  for (int w = 0; w < kNumWalls; ++w) {
    const double cw = params.c_wall[w];
    const double ri = params.r_inside[w];
    const double rw = params.r_wall[w];
    const double ro = params.r_outside[w];

    m.a(0, 1 + w) = 1.0 / (params.c_zone * ri);

    // inside surface node
    m.a(1 + w, 0) = 1.0 / (cw * ri);
    m.a(1 + w, 1 + w) = -(ri + rw) / (cw * ri * rw);
    m.a(1 + w, 5 + w) = 1.0 / (cw * rw);

    // outside surface node
    m.a(5 + w, 1 + w) = 1.0 / (cw * rw);
    m.a(5 + w, 5 + w) = -(ro + rw) / (cw * ro * rw);
  }
  m.b(0) = 1.0 / params.c_zone;
  return m;
}

Vector9 DiscreteZoneModel::disturbance(const DisturbanceSample& s) const {
  ContinuousZoneModel cont;
  cont.params = params;
  return input_integral * cont.disturbance(s);
}

Vector9 DiscreteZoneModel::step(const Vector9& x, double u, const DisturbanceSample& s) const {
  return a * x + b * u + disturbance(s);
}

Eigen::Matrix<double, 1, kStateDim> DiscreteZoneModel::output_row() {
  Eigen::Matrix<double, 1, kStateDim> c = Eigen::Matrix<double, 1, kStateDim>::Zero();
  c(0, 0) = 1.0;
  return c;
}

DiscreteZoneModel discretize(const ContinuousZoneModel& model, double dt_s, HvacMode mode) {
  if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
    throw std::invalid_argument("dt_s must be positive and finite");
  }
  // Augmented exponential yields exp(a dt) and \int_0^dt exp(a s) ds in one call.
  Eigen::Matrix<double, 2 * kStateDim, 2 * kStateDim> aug =
      Eigen::Matrix<double, 2 * kStateDim, 2 * kStateDim>::Zero();
  aug.topLeftCorner(kStateDim, kStateDim) = model.a * dt_s;
  aug.topRightCorner(kStateDim, kStateDim) =
      Eigen::Matrix<double, kStateDim, kStateDim>::Identity() * dt_s;
  const Eigen::Matrix<double, 2 * kStateDim, 2 * kStateDim> e = aug.exp();

  DiscreteZoneModel d;
  d.a = e.topLeftCorner(kStateDim, kStateDim);
  d.input_integral = e.topRightCorner(kStateDim, kStateDim);
  d.b = d.input_integral * model.b;
  if (mode == HvacMode::Cooling) d.b = -d.b;
  d.dt_s = dt_s;
  d.mode = mode;
  d.params = model.params;
  return d;
}

DisturbanceSample MultiZoneModel::effective_sample(int zone, const DisturbanceSample& s,
                                                   const Eigen::VectorXd& x) const {
  DisturbanceSample eff = s;
  for (int w = 0; w < kNumWalls; ++w) {
    const int nb = adjacency[zone][w];
    if (nb != kAmbient) {
      eff.outdoor_temp_c[w] = x(nb * kStateDim);
      eff.wall_solar_w[w] = 0.0;  // interior partition receives no sun
    }
  }
  return eff;
}

Eigen::VectorXd MultiZoneModel::disturbance(std::span<const DisturbanceSample> samples,
                                            const Eigen::VectorXd& x) const {
  const int n = zone_count();
  if (static_cast<int>(samples.size()) != n) {
    throw std::invalid_argument("one disturbance sample per zone required");
  }
  if (x.size() != state_dim()) throw std::invalid_argument("state dimension mismatch");
  Eigen::VectorXd d(state_dim());
  for (int m = 0; m < n; ++m) {
    d.segment<kStateDim>(m * kStateDim) =
        zones[m].disturbance(effective_sample(m, samples[m], x));
  }
  return d;
}

Eigen::VectorXd MultiZoneModel::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                     std::span<const DisturbanceSample> samples) const {
  if (u.size() != zone_count()) throw std::invalid_argument("one input per zone required");
  return a * x + b * u + disturbance(samples, x);
}

Eigen::VectorXd MultiZoneModel::outputs(const Eigen::VectorXd& x) const {
  return c * x;
}

MultiZoneModel compose_multizone(std::vector<DiscreteZoneModel> zones) {
  std::vector<std::array<int, kNumWalls>> adjacency(
      zones.size(), {kAmbient, kAmbient, kAmbient, kAmbient});
  return compose_multizone(std::move(zones), std::move(adjacency));
}

MultiZoneModel compose_multizone(std::vector<DiscreteZoneModel> zones,
                                 std::vector<std::array<int, kNumWalls>> adjacency) {
  const int n = static_cast<int>(zones.size());
  if (n == 0) throw std::invalid_argument("at least one zone required");
  if (adjacency.size() != zones.size()) {
    throw std::invalid_argument("adjacency must cover every zone");
  }
  for (int m = 0; m < n; ++m) {
    for (int w = 0; w < kNumWalls; ++w) {
      const int nb = adjacency[m][w];
      if (nb == kAmbient) continue;
      if (nb < 0 || nb >= n) throw std::invalid_argument("adjacency index out of range");
      if (nb == m) throw std::invalid_argument("zone cannot neighbour itself");
    }
  }

  MultiZoneModel mz;
  mz.adjacency = std::move(adjacency);
  mz.a = Eigen::MatrixXd::Zero(n * kStateDim, n * kStateDim);
  mz.b = Eigen::MatrixXd::Zero(n * kStateDim, n);
  mz.c = Eigen::MatrixXd::Zero(n, n * kStateDim);
  for (int m = 0; m < n; ++m) {
    mz.a.block<kStateDim, kStateDim>(m * kStateDim, m * kStateDim) = zones[m].a;
    mz.b.block<kStateDim, 1>(m * kStateDim, m) = zones[m].b;
    mz.c(m, m * kStateDim) = 1.0;
  }
  mz.zones = std::move(zones);
  return mz;
}

}  // namespace zonempc::thermal
