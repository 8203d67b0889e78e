#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace zonempc::qp {

// minimize 0.5 z'Hz + f'z  subject to  G z <= h,  lower <= z <= upper.
// H must be symmetric positive semidefinite; bounds may be +-infinity.
struct Problem {
  Eigen::MatrixXd hessian;   // n x n
  Eigen::VectorXd linear;    // n
  Eigen::MatrixXd ineq;      // m x n, m may be zero
  Eigen::VectorXd ineq_rhs;  // m
  Eigen::VectorXd lower;     // n
  Eigen::VectorXd upper;     // n

  int num_vars() const { return static_cast<int>(hessian.rows()); }
  int num_ineq() const { return static_cast<int>(ineq.rows()); }
  void validate() const;  // throws std::invalid_argument on malformed input
};

enum class Status { Optimal, Infeasible, MaxIterations };

const char* to_string(Status s);

struct Settings {
  double feas_tol = 1e-6;    // max constraint violation accepted as optimal
  double kkt_tol = 1e-6;     // stationarity residual, relative to data magnitude
  int max_iterations = 10000;
  double over_relaxation = 1.6;
  double sigma = 1e-6;       // proximal regularization of the splitting
  double rho = 0.1;          // initial penalty, adapted unless adaptive_rho = false
  bool adaptive_rho = true;
  bool polish = true;        // active-set refinement after convergence
  int scaling_iters = 10;    // Ruiz equilibration passes, 0 disables
  int check_interval = 25;
};

struct WarmStart {
  Eigen::VectorXd primal;  // n
  Eigen::VectorXd dual;    // m + n, same layout as Solution::dual
};

// dual layout: first m entries belong to the rows of G (nonnegative at optimum),
// the last n entries to the variable bounds (positive at upper, negative at lower).
struct Solution {
  Eigen::VectorXd primal;
  Eigen::VectorXd dual;
  double objective = 0.0;
  Status status = Status::MaxIterations;
  double primal_residual = 0.0;  // worst constraint violation, absolute
  double dual_residual = 0.0;    // stationarity residual / max(1, data magnitude)
  int iterations = 0;
  bool polished = false;
  bool regularized = false;  // hessian was bumped by eps_reg to factorize
  std::string note;
};

Solution solve(const Problem& problem, const Settings& settings = {},
               const std::optional<WarmStart>& warm = std::nullopt);

// Raw infinity-norm KKT measures at (z, dual); dual may be omitted (treated as zero).
// complementarity charges |y_i| in full when a multiplier pushes on an infinite or
// wrong-side bound, so a sound point has all three fields small.
struct KktReport {
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double complementarity = 0.0;
  double overall() const;
};

KktReport check_kkt(const Problem& problem, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& dual);
KktReport check_kkt(const Problem& problem, const Eigen::VectorXd& z);

}  // namespace zonempc::qp
