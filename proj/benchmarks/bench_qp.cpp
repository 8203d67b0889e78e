// Solver throughput at the problem sizes the controllers actually produce:
// 16 = one zone (P=8), 48/576 = joint problems for 3 and 36 zones.

#include "zonempc/qp.hpp"

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace {

zonempc::qp::Problem make_problem(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
  }

  zonempc::qp::Problem p;
  p.hessian = m.transpose() * m / n + Eigen::MatrixXd::Identity(n, n);
  p.linear = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return 5.0 * gauss(rng); });
  p.lower = Eigen::VectorXd::Constant(n, -3.0);
  p.upper = Eigen::VectorXd::Constant(n, 3.0);

  const int rows = 2 * n;
  p.ineq.resize(rows, n);
  p.ineq_rhs.resize(rows);
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < n; ++j) p.ineq(r, j) = gauss(rng);
    p.ineq_rhs(r) = 0.5 + std::abs(gauss(rng));  // the origin stays strictly feasible
  }
  return p;
}

void bm_qp_solve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const zonempc::qp::Problem problem = make_problem(n, 0xC0FFEE + n);
  for (auto _ : state) {
    const zonempc::qp::Solution sol = zonempc::qp::solve(problem);
    benchmark::DoNotOptimize(sol.objective);
    if (sol.status != zonempc::qp::Status::Optimal) state.SkipWithError("solve failed");
  }
}

void bm_qp_solve_warm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const zonempc::qp::Problem problem = make_problem(n, 0xC0FFEE + n);
  const zonempc::qp::Solution cold = zonempc::qp::solve(problem);
  const zonempc::qp::WarmStart warm{cold.primal, cold.dual};
  for (auto _ : state) {
    const zonempc::qp::Solution sol = zonempc::qp::solve(problem, {}, warm);
    benchmark::DoNotOptimize(sol.objective);
    if (sol.status != zonempc::qp::Status::Optimal) state.SkipWithError("solve failed");
  }
}

}  // namespace

BENCHMARK(bm_qp_solve)->Arg(16)->Arg(48)->Arg(144)->Arg(576)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_qp_solve_warm)->Arg(16)->Arg(48)->Arg(144)->Arg(576)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
