#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace zonempc::thermal {

inline constexpr int kNumWalls = 4;
inline constexpr int kStateDim = 9;  // zone air + 4 inside surfaces + 4 outside surfaces
inline constexpr int kAmbient = -1;  // adjacency marker: wall faces outdoor air

enum class Orientation : int { North = 0, East = 1, West = 2, South = 3 };

enum class HvacMode { Heating, Cooling };

using Vector9 = Eigen::Matrix<double, kStateDim, 1>;
using Matrix9 = Eigen::Matrix<double, kStateDim, kStateDim>;

// Lumped RC parameters of a rectangular zone with four external walls.
// Resistances in K/W, capacitances in J/K. Index order: north, east, west, south.
struct ZoneThermalParams {
  std::array<double, kNumWalls> r_inside{};   // air film + half construction, zone side
  std::array<double, kNumWalls> r_wall{};     // through-wall conduction between surface nodes
  std::array<double, kNumWalls> r_outside{};  // outdoor film
  std::array<double, kNumWalls> c_wall{};     // per surface node
  double c_zone = 0.0;                        // zone air + furniture

  // Calibrated 36 m2 office zone used by the built-in scenarios.
  static ZoneThermalParams reference_office();

  void validate() const;  // throws std::invalid_argument
};

// Exogenous heat inputs over one sampling interval.
struct DisturbanceSample {
  std::array<double, kNumWalls> outdoor_temp_c{};  // sol-air / ambient per wall
  std::array<double, kNumWalls> wall_solar_w{};    // absorbed on outside surfaces
  double internal_gain_w = 0.0;                    // occupants + lights + equipment
  double zone_solar_w = 0.0;                       // transmitted through glazing

  void validate() const;
};

// dx/dt = a x + b q + d(sample), y = x(0); q is thermal power added to the air node.
struct ContinuousZoneModel {
  Matrix9 a = Matrix9::Zero();
  Vector9 b = Vector9::Zero();
  ZoneThermalParams params;

  Vector9 disturbance(const DisturbanceSample& s) const;
};

ContinuousZoneModel build_zone_matrices(const ZoneThermalParams& params);

// Zero-order-hold discretization. x+ = a x + b u + disturbance(sample).
// In cooling mode b is negated so u >= 0 means heat extraction.
struct DiscreteZoneModel {
  Matrix9 a = Matrix9::Zero();
  Vector9 b = Vector9::Zero();
  Matrix9 input_integral = Matrix9::Zero();  // \int_0^dt exp(a_c s) ds
  double dt_s = 0.0;
  HvacMode mode = HvacMode::Cooling;
  ZoneThermalParams params;

  Vector9 disturbance(const DisturbanceSample& s) const;
  Vector9 step(const Vector9& x, double u, const DisturbanceSample& s) const;
  double output(const Vector9& x) const { return x(0); }
  static Eigen::Matrix<double, 1, kStateDim> output_row();
};

DiscreteZoneModel discretize(const ContinuousZoneModel& model, double dt_s,
                             HvacMode mode = HvacMode::Cooling);

// Block-diagonal collection of zones. adjacency[m][w] is kAmbient or the index of the
// zone behind wall w; adjacent zone air temperatures enter as measured disturbances.
struct MultiZoneModel {
  std::vector<DiscreteZoneModel> zones;
  std::vector<std::array<int, kNumWalls>> adjacency;
  Eigen::MatrixXd a;  // 9N x 9N
  Eigen::MatrixXd b;  // 9N x N
  Eigen::MatrixXd c;  // N x 9N

  int zone_count() const { return static_cast<int>(zones.size()); }
  int state_dim() const { return zone_count() * kStateDim; }

  // Per-zone sample with adjacency-facing outdoor temperatures replaced by the
  // neighbours' air temperatures taken from x.
  DisturbanceSample effective_sample(int zone, const DisturbanceSample& s,
                                     const Eigen::VectorXd& x) const;
  Eigen::VectorXd disturbance(std::span<const DisturbanceSample> samples,
                              const Eigen::VectorXd& x) const;
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       std::span<const DisturbanceSample> samples) const;
  Eigen::VectorXd outputs(const Eigen::VectorXd& x) const;
};

MultiZoneModel compose_multizone(std::vector<DiscreteZoneModel> zones);
MultiZoneModel compose_multizone(std::vector<DiscreteZoneModel> zones,
                                 std::vector<std::array<int, kNumWalls>> adjacency);

}  // namespace zonempc::thermal
