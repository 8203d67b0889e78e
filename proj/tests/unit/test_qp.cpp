#include "zonempc/qp.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace zonempc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

qp::Problem box_only(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  qp::Problem p;
  p.hessian = h;
  p.linear = f;
  p.ineq.resize(0, h.rows());
  p.ineq_rhs.resize(0);
  p.lower = lo;
  p.upper = hi;
  return p;
}

}  // namespace

TEST_CASE("clamped scalar minimum lands on the bound with the right multiplier") {
  // minimize (z - 3)^2 subject to z <= 2; optimum at z = 2, objective of the
  // canonical quadratic form is 0.5*2*4 - 6*2 = -8
  qp::Problem p = box_only(Eigen::MatrixXd::Constant(1, 1, 2.0),
                           Eigen::VectorXd::Constant(1, -6.0),
                           Eigen::VectorXd::Constant(1, -kInf),
                           Eigen::VectorXd::Constant(1, 2.0));
  const qp::Solution sol = qp::solve(p);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.primal(0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.objective == doctest::Approx(-8.0).epsilon(1e-9));
  // stationarity: 2z - 6 + y = 0 at z=2 gives y = 2 on the box row
  CHECK(sol.dual(0) == doctest::Approx(2.0).epsilon(1e-6));
  const qp::KktReport rep = qp::check_kkt(p, sol.primal, sol.dual);
  CHECK(rep.overall() < 1e-6);
}

TEST_CASE("pinned variable via equal bounds") {
  qp::Problem p = box_only(Eigen::MatrixXd::Identity(2, 2) * 2.0,
                           Eigen::VectorXd::Zero(2), Eigen::Vector2d(1.5, -kInf),
                           Eigen::Vector2d(1.5, kInf));
  const qp::Solution sol = qp::solve(p);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.primal(0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::abs(sol.primal(1)) < 1e-7);
}

TEST_CASE("row constraint pushes the minimizer off the origin") {
  // minimize z1^2 + z2^2 subject to z1 + z2 >= 4  ->  z = (2, 2)
  qp::Problem p;
  p.hessian = Eigen::MatrixXd::Identity(2, 2) * 2.0;
  p.linear = Eigen::VectorXd::Zero(2);
  p.ineq = -Eigen::MatrixXd::Ones(1, 2);
  p.ineq_rhs = Eigen::VectorXd::Constant(1, -4.0);
  p.lower = Eigen::Vector2d(-kInf, -kInf);
  p.upper = Eigen::Vector2d(kInf, kInf);
  const qp::Solution sol = qp::solve(p);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.primal(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(sol.primal(1) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(qp::check_kkt(p, sol.primal, sol.dual).overall() < 1e-6);
}

TEST_CASE("three variable instance agrees with the grid oracle") {
  std::mt19937_64 rng(7);
  const testsupport::RandomQp inst = testsupport::make_random_qp(rng, 3, true);
  const qp::Solution sol = qp::solve(inst.problem);
  REQUIRE(sol.status == qp::Status::Optimal);
  const testsupport::GridResult grid = testsupport::grid_minimize(inst.problem, inst.interior);
  REQUIRE(grid.found);
  CHECK((sol.primal - grid.z).cwiseAbs().maxCoeff() < 2e-3);
  CHECK(sol.objective <= grid.objective + 1e-6 * (1.0 + std::abs(grid.objective)));
}

TEST_CASE("randomized instances: optimal, KKT-clean and grid-confirmed") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(trial % 6);
    const testsupport::RandomQp inst = testsupport::make_random_qp(rng, n, trial % 2 == 0);
    const qp::Solution sol = qp::solve(inst.problem);
    REQUIRE(sol.status == qp::Status::Optimal);
    const qp::KktReport rep = qp::check_kkt(inst.problem, sol.primal, sol.dual);
    CHECK(rep.stationarity < 1e-6);
    CHECK(rep.primal_feasibility < 1e-6);
    CHECK(rep.complementarity < 1e-5);
    const testsupport::GridResult grid =
        testsupport::grid_minimize(inst.problem, inst.interior);
    CHECK((sol.primal - grid.z).cwiseAbs().maxCoeff() < 2e-3);
  }
}

TEST_CASE("inconsistent bounds are reported infeasible without iterating") {
  qp::Problem p = box_only(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1),
                           Eigen::VectorXd::Constant(1, 2.0),
                           Eigen::VectorXd::Constant(1, 1.0));
  const qp::Solution sol = qp::solve(p);
  CHECK(sol.status == qp::Status::Infeasible);
  CHECK(std::isnan(sol.objective));
}

TEST_CASE("contradictory rows yield an infeasibility certificate") {
  // z <= -1 and z >= 1 cannot hold together
  qp::Problem p;
  p.hessian = Eigen::MatrixXd::Identity(1, 1) * 2.0;
  p.linear = Eigen::VectorXd::Zero(1);
  p.ineq.resize(2, 1);
  p.ineq << 1.0, -1.0;
  p.ineq_rhs.resize(2);
  p.ineq_rhs << -1.0, -1.0;
  p.lower = Eigen::VectorXd::Constant(1, -kInf);
  p.upper = Eigen::VectorXd::Constant(1, kInf);
  const qp::Solution sol = qp::solve(p);
  CHECK(sol.status == qp::Status::Infeasible);
}

TEST_CASE("solves are bitwise deterministic") {
  std::mt19937_64 rng(99);
  const testsupport::RandomQp inst = testsupport::make_random_qp(rng, 5, true);
  const qp::Solution a = qp::solve(inst.problem);
  const qp::Solution b = qp::solve(inst.problem);
  REQUIRE(a.primal.size() == b.primal.size());
  CHECK((a.primal.array() == b.primal.array()).all());
  CHECK((a.dual.array() == b.dual.array()).all());
  CHECK(a.iterations == b.iterations);
  CHECK(a.objective == b.objective);
}

TEST_CASE("joint scaling of objective and constraints keeps the minimizer") {
  std::mt19937_64 rng(123);
  const testsupport::RandomQp inst = testsupport::make_random_qp(rng, 4, true);
  const qp::Solution base = qp::solve(inst.problem);

  qp::Problem scaled = inst.problem;
  const double c_obj = 100.0;
  const double c_rows = 50.0;
  scaled.hessian *= c_obj;
  scaled.linear *= c_obj;
  scaled.ineq *= c_rows;
  scaled.ineq_rhs *= c_rows;
  const qp::Solution s = qp::solve(scaled);
  REQUIRE(s.status == qp::Status::Optimal);
  CHECK((s.primal - base.primal).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(s.objective == doctest::Approx(c_obj * base.objective).epsilon(1e-6));
}

TEST_CASE("iteration limit returns the best iterate, not garbage") {
  std::mt19937_64 rng(5);
  const testsupport::RandomQp inst = testsupport::make_random_qp(rng, 6, true);
  qp::Settings st;
  st.max_iterations = 3;
  st.check_interval = 1;
  st.polish = false;
  const qp::Solution sol = qp::solve(inst.problem, st);
  CHECK(sol.status == qp::Status::MaxIterations);
  CHECK(sol.note == "iteration limit reached");
  CHECK(sol.primal.allFinite());
  CHECK(sol.iterations == 3);
}

TEST_CASE("malformed problems are rejected") {
  qp::Problem p = box_only(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                           Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
  p.hessian(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(qp::solve(p), std::invalid_argument);

  p = box_only(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(3),
               Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
  CHECK_THROWS_AS(qp::solve(p), std::invalid_argument);

  // clearly indefinite hessian cannot be factorized even with the fallback bump
  p = box_only(Eigen::MatrixXd::Constant(1, 1, -4.0), Eigen::VectorXd::Zero(1),
               Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
  CHECK_THROWS_AS(qp::solve(p), std::invalid_argument);
}

TEST_CASE("check_kkt flags a multiplier pushing on an inactive bound") {
  qp::Problem p = box_only(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Zero(1),
                           Eigen::VectorXd::Constant(1, -2.0),
                           Eigen::VectorXd::Constant(1, 2.0));
  Eigen::VectorXd z = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd dual = Eigen::VectorXd::Constant(1, 1.0);  // claims upper bound active
  const qp::KktReport rep = qp::check_kkt(p, z, dual);
  CHECK(rep.complementarity == doctest::Approx(1.0));   // y * |z - upper| = 1 * 1
  CHECK(rep.stationarity == doctest::Approx(3.0));      // |2*1 + 0 + 1|
  CHECK(rep.primal_feasibility == 0.0);

  // the same point with a zero dual is stationarity-dirty but complementarity-clean
  const qp::KktReport rep0 = qp::check_kkt(p, z);
  CHECK(rep0.complementarity == 0.0);
  CHECK(rep0.stationarity == doctest::Approx(2.0));
}

TEST_CASE("polish tightens a converged solution") {
  std::mt19937_64 rng(31);
  const testsupport::RandomQp inst = testsupport::make_random_qp(rng, 4, true);
  const qp::Solution sol = qp::solve(inst.problem);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.polished);
  CHECK(qp::check_kkt(inst.problem, sol.primal, sol.dual).overall() < 1e-8);
}

TEST_CASE("warm starting does not change the answer and saves iterations") {
  std::mt19937_64 rng(64);
  const testsupport::RandomQp inst = testsupport::make_random_qp(rng, 6, true);
  const qp::Solution cold = qp::solve(inst.problem);
  qp::WarmStart warm{cold.primal, cold.dual};
  const qp::Solution hot = qp::solve(inst.problem, {}, warm);
  REQUIRE(hot.status == qp::Status::Optimal);
  CHECK((hot.primal - cold.primal).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(hot.iterations <= cold.iterations);
}
