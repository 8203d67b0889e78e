#include "zonempc/thermal.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace zonempc;

namespace {

thermal::DisturbanceSample hot_day_sample() {
  thermal::DisturbanceSample s;
  s.outdoor_temp_c = {30.0, 30.0, 30.0, 30.0};
  s.wall_solar_w = {100.0, 100.0, 100.0, 100.0};
  s.internal_gain_w = 240.0;
  s.zone_solar_w = 50.0;
  return s;
}

}  // namespace

TEST_CASE("reference parameters produce the documented coupling matrix") {
  const auto params = thermal::ZoneThermalParams::reference_office();
  const auto model = thermal::build_zone_matrices(params);

  // values frozen from an independent construction of the same network
  CHECK(model.a(0, 0) == doctest::Approx(-0.0031400630329996293).epsilon(1e-12));
  CHECK(model.a(0, 1) == doctest::Approx(0.0006720430107526882).epsilon(1e-12));
  CHECK(model.a(1, 0) == doctest::Approx(3.795066413662239e-05).epsilon(1e-12));
  CHECK(model.a(1, 1) == doctest::Approx(-8.738220145743308e-05).epsilon(1e-12));
  CHECK(model.a(1, 5) == doctest::Approx(4.9431537320810677e-05).epsilon(1e-12));
  CHECK(model.a(5, 1) == doctest::Approx(4.9431537320810677e-05).epsilon(1e-12));
  CHECK(model.a(5, 5) == doctest::Approx(-0.00015085141561695673).epsilon(1e-12));
  CHECK(model.b(0) == doctest::Approx(1.0 / 4.8e4).epsilon(1e-14));

  // sparsity: the zone air node never couples directly to outside surfaces
  for (int w = 0; w < 4; ++w) {
    CHECK(model.a(0, 5 + w) == 0.0);
    CHECK(model.a(5 + w, 0) == 0.0);
    CHECK(model.b(1 + w) == 0.0);
    CHECK(model.b(5 + w) == 0.0);
  }
  // every diagonal entry is strictly negative, off-diagonals nonnegative
  for (int i = 0; i < thermal::kStateDim; ++i) {
    CHECK(model.a(i, i) < 0.0);
    for (int j = 0; j < thermal::kStateDim; ++j) {
      if (i != j) CHECK(model.a(i, j) >= 0.0);
    }
  }
}

TEST_CASE("discretization matches the matrix exponential oracle") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Heating);

  CHECK(zone.a(0, 0) == doctest::Approx(0.06847524110539147).epsilon(1e-12));
  CHECK(zone.a(0, 1) == doctest::Approx(0.19335898107406305).epsilon(1e-12));
  CHECK(zone.a(0, 5) == doctest::Approx(0.005876893940929942).epsilon(1e-12));
  CHECK(zone.b(0) == doctest::Approx(0.006330595670669936).epsilon(1e-12));
  CHECK(zone.b(1) == doctest::Approx(0.0001475543652090459).epsilon(1e-12));
  CHECK(zone.input_integral(0, 0) == doctest::Approx(303.86859219215694).epsilon(1e-12));

  const auto cooling = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  CHECK(cooling.b(0) == doctest::Approx(-zone.b(0)).epsilon(1e-14));
  CHECK(cooling.a.isApprox(zone.a, 1e-14));
}

TEST_CASE("one step agrees with a fine RK4 integration") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  thermal::Vector9 x0;
  x0 << 26.5, 26.0, 25.8, 26.2, 26.1, 27.5, 28.0, 27.2, 27.9;
  const auto s = hot_day_sample();

  const thermal::Vector9 x1 = zone.step(x0, 350.0, s);
  const thermal::Vector9 ref = testsupport::rk4_integrate(cont, x0, -350.0, s, 900.0, 2000);
  CHECK((x1 - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("two half steps equal one full step") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto full = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  const auto half = thermal::discretize(cont, 450.0, thermal::HvacMode::Cooling);

  CHECK((full.a - half.a * half.a).cwiseAbs().maxCoeff() < 1e-12);

  thermal::Vector9 x0 = thermal::Vector9::Constant(26.0);
  const auto s = hot_day_sample();
  const thermal::Vector9 one = full.step(x0, 420.0, s);
  const thermal::Vector9 two = half.step(half.step(x0, 420.0, s), 420.0, s);
  CHECK((one - two).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("constant conditions settle at the frozen fixed point") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  const auto s = hot_day_sample();

  const Eigen::Matrix<double, 9, 9> eye = Eigen::Matrix<double, 9, 9>::Identity();
  const thermal::Vector9 xss =
      (eye - zone.a).partialPivLu().solve(zone.b * 300.0 + zone.disturbance(s));
  CHECK(xss(0) == doctest::Approx(30.852).epsilon(1e-9));
  // it is a fixed point of step()
  CHECK((zone.step(xss, 300.0, s) - xss).cwiseAbs().maxCoeff() < 1e-10);

  // long simulation converges there
  thermal::Vector9 x = thermal::Vector9::Constant(26.0);
  for (int k = 0; k < 3000; ++k) x = zone.step(x, 300.0, s);
  CHECK(std::abs(x(0) - xss(0)) < 1e-6);
}

TEST_CASE("frozen 24 hour trajectory under constant cooling") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  const auto s = hot_day_sample();
  thermal::Vector9 x = thermal::Vector9::Constant(26.0);
  for (int k = 0; k < 96; ++k) x = zone.step(x, 200.0, s);
  CHECK(x(0) == doctest::Approx(31.74621019643934).epsilon(1e-10));
}

TEST_CASE("more cooling lowers the next temperature, linearly") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  const auto s = hot_day_sample();
  const thermal::Vector9 x0 = thermal::Vector9::Constant(26.0);

  const double t_low = zone.step(x0, 400.0, s)(0);
  const double t_high = zone.step(x0, 100.0, s)(0);
  CHECK(t_low < t_high);

  // superposition in the input
  const thermal::Vector9 base = zone.step(x0, 0.0, s);
  const thermal::Vector9 with_u = zone.step(x0, 250.0, s);
  CHECK((with_u - base - zone.b * 250.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("disturbance is additive in the gains") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  auto s0 = hot_day_sample();
  auto s1 = s0;
  s1.internal_gain_w += 120.0;
  auto s2 = s0;
  s2.internal_gain_w += 240.0;
  const thermal::Vector9 d0 = zone.disturbance(s0);
  const thermal::Vector9 d1 = zone.disturbance(s1);
  const thermal::Vector9 d2 = zone.disturbance(s2);
  CHECK(((d2 - d1) - (d1 - d0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("multizone composition is block diagonal and steps like its parts") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  const auto model = thermal::compose_multizone({zone, zone});
  const auto s = hot_day_sample();

  Eigen::VectorXd x(18);
  x << 26, 26, 26, 26, 26, 27, 27, 27, 27, 24, 24, 24, 24, 24, 25, 25, 25, 25;
  Eigen::Vector2d u(300.0, 150.0);
  const std::vector<thermal::DisturbanceSample> samples = {s, s};
  const Eigen::VectorXd xn = model.step(x, u, samples);

  const thermal::Vector9 a = zone.step(x.head<9>(), u(0), s);
  const thermal::Vector9 b = zone.step(x.tail<9>(), u(1), s);
  CHECK((xn.head<9>() - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((xn.tail<9>() - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(model.outputs(x)(0) == 26.0);
  CHECK(model.outputs(x)(1) == 24.0);
}

TEST_CASE("interior walls read the neighbour's air temperature") {
  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  const auto zone = thermal::discretize(cont, 900.0, thermal::HvacMode::Cooling);
  // zone 1's east wall faces zone 0
  std::vector<std::array<int, 4>> adj = {
      {thermal::kAmbient, thermal::kAmbient, thermal::kAmbient, thermal::kAmbient},
      {thermal::kAmbient, 0, thermal::kAmbient, thermal::kAmbient}};
  const auto model = thermal::compose_multizone({zone, zone}, adj);

  Eigen::VectorXd x = Eigen::VectorXd::Constant(18, 24.0);
  x(0) = 29.5;  // zone 0 air
  const auto s = hot_day_sample();
  const auto eff = model.effective_sample(1, s, x);
  CHECK(eff.outdoor_temp_c[static_cast<int>(thermal::Orientation::East)] == 29.5);
  CHECK(eff.wall_solar_w[static_cast<int>(thermal::Orientation::East)] == 0.0);
  CHECK(eff.outdoor_temp_c[static_cast<int>(thermal::Orientation::North)] == 30.0);

  const std::vector<thermal::DisturbanceSample> samples = {s, s};
  const Eigen::VectorXd d = model.disturbance(samples, x);
  const thermal::Vector9 expect = zone.disturbance(eff);
  CHECK((d.tail<9>() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("invalid inputs are rejected") {
  auto params = thermal::ZoneThermalParams::reference_office();
  params.r_wall[1] = -0.1;
  CHECK_THROWS_AS(thermal::build_zone_matrices(params), std::invalid_argument);

  params = thermal::ZoneThermalParams::reference_office();
  params.c_zone = 0.0;
  CHECK_THROWS_AS(thermal::build_zone_matrices(params), std::invalid_argument);

  const auto cont = thermal::build_zone_matrices(thermal::ZoneThermalParams::reference_office());
  CHECK_THROWS_AS(thermal::discretize(cont, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(thermal::discretize(cont, -10.0), std::invalid_argument);

  const auto zone = thermal::discretize(cont, 900.0);
  thermal::DisturbanceSample bad = hot_day_sample();
  bad.wall_solar_w[0] = -5.0;
  CHECK_THROWS_AS(zone.disturbance(bad), std::invalid_argument);
  bad = hot_day_sample();
  bad.outdoor_temp_c[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(zone.disturbance(bad), std::invalid_argument);

  // self adjacency and out-of-range neighbours
  std::vector<std::array<int, 4>> self_adj = {{0, thermal::kAmbient, thermal::kAmbient,
                                               thermal::kAmbient}};
  CHECK_THROWS_AS(thermal::compose_multizone({zone}, self_adj), std::invalid_argument);
  std::vector<std::array<int, 4>> oob = {{5, thermal::kAmbient, thermal::kAmbient,
                                          thermal::kAmbient}};
  CHECK_THROWS_AS(thermal::compose_multizone({zone}, oob), std::invalid_argument);
}
