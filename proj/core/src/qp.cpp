#include "zonempc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace zonempc::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEpsReg = 1e-9;
constexpr double kEpsInfeasible = 1e-6;
constexpr double kPolishReg = 1e-9;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Everything the iteration needs, in one place. Scaled copies carry the Ruiz
// diagonal scalings d (variables), e (constraint rows) and cost factor c.
struct Workspace {
  int n = 0;
  int mt = 0;  // rows of the stacked constraint matrix [G; I]
  Eigen::MatrixXd h, a;            // unscaled
  Eigen::VectorXd f, l, u;
  Eigen::MatrixXd hs, as;          // scaled
  Eigen::VectorXd fs, ls, us;
  Eigen::VectorXd d, e;
  double c = 1.0;
};

Workspace build_workspace(const Problem& p, int scaling_iters) {
  Workspace w;
  w.n = p.num_vars();
  const int m = p.num_ineq();
  w.mt = m + w.n;

  w.h = 0.5 * (p.hessian + p.hessian.transpose());
  w.f = p.linear;
  w.a.resize(w.mt, w.n);
  if (m > 0) w.a.topRows(m) = p.ineq;
  w.a.bottomRows(w.n) = Eigen::MatrixXd::Identity(w.n, w.n);
  w.l.resize(w.mt);
  w.u.resize(w.mt);
  w.l.head(m).setConstant(-kInf);
  w.u.head(m) = p.ineq_rhs;
  w.l.tail(w.n) = p.lower;
  w.u.tail(w.n) = p.upper;

  w.hs = w.h;
  w.fs = w.f;
  w.as = w.a;
  w.d = Eigen::VectorXd::Ones(w.n);
  w.e = Eigen::VectorXd::Ones(w.mt);
  w.c = 1.0;

  for (int it = 0; it < scaling_iters; ++it) {
    for (int j = 0; j < w.n; ++j) {
      double norm = std::max(w.hs.col(j).cwiseAbs().maxCoeff(),
                             w.as.col(j).cwiseAbs().maxCoeff());
      norm = std::clamp(norm, 1e-8, 1e8);
      const double dj = 1.0 / std::sqrt(norm);
      w.hs.col(j) *= dj;
      w.hs.row(j) *= dj;
      w.as.col(j) *= dj;
      w.fs(j) *= dj;
      w.d(j) *= dj;
    }
    for (int i = 0; i < w.mt; ++i) {
      double norm = std::clamp(w.as.row(i).cwiseAbs().maxCoeff(), 1e-8, 1e8);
      const double ei = 1.0 / std::sqrt(norm);
      w.as.row(i) *= ei;
      w.e(i) *= ei;
    }
    double col_mean = 0.0;
    for (int j = 0; j < w.n; ++j) col_mean += w.hs.col(j).cwiseAbs().maxCoeff();
    col_mean /= w.n;
    const double gamma = 1.0 / std::clamp(std::max(col_mean, inf_norm(w.fs)), 1e-8, 1e8);
    w.hs *= gamma;
    w.fs *= gamma;
    w.c *= gamma;
  }
  w.ls = w.e.cwiseProduct(w.l);
  w.us = w.e.cwiseProduct(w.u);
  // 0 * inf guards: scaled bounds must keep their sign structure
  for (int i = 0; i < w.mt; ++i) {
    if (std::isinf(w.l(i))) w.ls(i) = w.l(i);
    if (std::isinf(w.u(i))) w.us(i) = w.u(i);
  }
  return w;
}

// Worst violation of the stacked constraints at an unscaled point.
double violation(const Workspace& w, const Eigen::VectorXd& z) {
  double v = 0.0;
  const Eigen::VectorXd az = w.a * z;
  for (int i = 0; i < w.mt; ++i) {
    if (std::isfinite(w.u(i))) v = std::max(v, az(i) - w.u(i));
    if (std::isfinite(w.l(i))) v = std::max(v, w.l(i) - az(i));
  }
  return v;
}

struct Stationarity {
  double raw = 0.0;
  double rel = 0.0;
};

Stationarity stationarity_at(const Workspace& w, const Eigen::VectorXd& z,
                             const Eigen::VectorXd& y) {
  const Eigen::VectorXd hz = w.h * z;
  const Eigen::VectorXd aty = w.a.transpose() * y;
  Stationarity s;
  s.raw = inf_norm(hz + w.f + aty);
  const double scale = std::max({1.0, inf_norm(hz), inf_norm(w.f), inf_norm(aty)});
  s.rel = s.raw / scale;
  return s;
}

bool primal_infeasibility_certificate(const Workspace& w, const Eigen::VectorXd& dy) {
  const double den = inf_norm(dy);
  if (den < 1e-14) return false;
  const double lhs = inf_norm(w.a.transpose() * dy);
  if (lhs > kEpsInfeasible * den) return false;
  double support = 0.0;
  for (int i = 0; i < w.mt; ++i) {
    if (dy(i) > kEpsInfeasible * den && !std::isfinite(w.u(i))) return false;
    if (dy(i) < -kEpsInfeasible * den && !std::isfinite(w.l(i))) return false;
    if (dy(i) > 0 && std::isfinite(w.u(i))) support += w.u(i) * dy(i);
    if (dy(i) < 0 && std::isfinite(w.l(i))) support += w.l(i) * dy(i);
  }
  return support <= -kEpsInfeasible * den;
}

bool dual_infeasibility_certificate(const Workspace& w, const Eigen::VectorXd& dx) {
  const double den = inf_norm(dx);
  if (den < 1e-14) return false;
  if (inf_norm(w.h * dx) > kEpsInfeasible * den) return false;
  if (w.f.dot(dx) > -kEpsInfeasible * den) return false;
  const Eigen::VectorXd adx = w.a * dx;
  for (int i = 0; i < w.mt; ++i) {
    if (std::isfinite(w.u(i)) && adx(i) > kEpsInfeasible * den) return false;
    if (std::isfinite(w.l(i)) && adx(i) < -kEpsInfeasible * den) return false;
  }
  return true;
}

struct PolishResult {
  bool ok = false;
  Eigen::VectorXd z, y;
};

PolishResult polish(const Workspace& w, const Eigen::VectorXd& y_admm) {
  PolishResult res;
  std::vector<int> active;
  std::vector<double> rhs_val;
  for (int i = 0; i < w.mt; ++i) {
    if (y_admm(i) > 0 && std::isfinite(w.u(i))) {
      active.push_back(i);
      rhs_val.push_back(w.u(i));
    } else if (y_admm(i) < 0 && std::isfinite(w.l(i))) {
      active.push_back(i);
      rhs_val.push_back(w.l(i));
    }
  }
  const int na = static_cast<int>(active.size());
  const int dim = w.n + na;

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd kkt_reg;
  kkt.topLeftCorner(w.n, w.n) = w.h;
  for (int k = 0; k < na; ++k) {
    kkt.block(0, w.n + k, w.n, 1) = w.a.row(active[k]).transpose();
    kkt.block(w.n + k, 0, 1, w.n) = w.a.row(active[k]);
  }
  kkt_reg = kkt;
  kkt_reg.topLeftCorner(w.n, w.n) += kPolishReg * Eigen::MatrixXd::Identity(w.n, w.n);
  kkt_reg.bottomRightCorner(na, na) -= kPolishReg * Eigen::MatrixXd::Identity(na, na);

  Eigen::VectorXd rhs(dim);
  rhs.head(w.n) = -w.f;
  for (int k = 0; k < na; ++k) rhs(w.n + k) = rhs_val[k];

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt_reg);
  Eigen::VectorXd sol = lu.solve(rhs);
  for (int refine = 0; refine < 3; ++refine) {
    const Eigen::VectorXd resid = rhs - kkt * sol;
    sol += lu.solve(resid);
  }
  if (!sol.allFinite()) return res;

  res.z = sol.head(w.n);
  res.y = Eigen::VectorXd::Zero(w.mt);
  for (int k = 0; k < na; ++k) res.y(active[k]) = sol(w.n + k);
  res.ok = true;
  return res;
}

}  // namespace

void Problem::validate() const {
  const int n = num_vars();
  const int m = num_ineq();
  require(n >= 1, "hessian must be at least 1x1");
  require(hessian.cols() == n, "hessian must be square");
  require(linear.size() == n, "linear term size mismatch");
  require(ineq.cols() == n || m == 0, "ineq column count mismatch");
  require(ineq_rhs.size() == m, "ineq_rhs size mismatch");
  require(lower.size() == n && upper.size() == n, "bound size mismatch");
  require(finite(hessian) && finite(linear), "hessian and linear must be finite");
  require(m == 0 || finite(ineq), "ineq must be finite");
  const double hnorm = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  require((hessian - hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * hnorm,
          "hessian must be symmetric");
  for (int i = 0; i < m; ++i) {
    require(!std::isnan(ineq_rhs(i)) && ineq_rhs(i) != -kInf,
            "ineq_rhs must not be NaN or -inf");
  }
  for (int i = 0; i < n; ++i) {
    require(!std::isnan(lower(i)) && lower(i) != kInf, "lower bound must not be +inf/NaN");
    require(!std::isnan(upper(i)) && upper(i) != -kInf, "upper bound must not be -inf/NaN");
  }
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

double KktReport::overall() const {
  return std::max({stationarity, primal_feasibility, complementarity});
}

KktReport check_kkt(const Problem& problem, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& dual) {
  problem.validate();
  const int n = problem.num_vars();
  const int m = problem.num_ineq();
  require(z.size() == n, "point size mismatch");
  require(dual.size() == m + n, "dual size mismatch (expect m + n)");

  Workspace w = build_workspace(problem, 0);
  KktReport rep;
  rep.primal_feasibility = violation(w, z);
  rep.stationarity = stationarity_at(w, z, dual).raw;

  const Eigen::VectorXd az = w.a * z;
  double comp = 0.0;
  for (int i = 0; i < w.mt; ++i) {
    const double y = dual(i);
    if (y > 0) {
      comp = std::max(comp, std::isfinite(w.u(i)) ? y * std::abs(az(i) - w.u(i)) : y);
    } else if (y < 0) {
      comp = std::max(comp, std::isfinite(w.l(i)) ? -y * std::abs(az(i) - w.l(i)) : -y);
    }
  }
  rep.complementarity = comp;
  return rep;
}

KktReport check_kkt(const Problem& problem, const Eigen::VectorXd& z) {
  return check_kkt(problem, z, Eigen::VectorXd::Zero(problem.num_ineq() + problem.num_vars()));
}

Solution solve(const Problem& problem, const Settings& settings,
               const std::optional<WarmStart>& warm) {
  problem.validate();
  Workspace w = build_workspace(problem, settings.scaling_iters);
  const int n = w.n;
  const int mt = w.mt;

  Solution sol;
  sol.primal = Eigen::VectorXd::Zero(n);
  sol.dual = Eigen::VectorXd::Zero(mt);

  for (int i = 0; i < mt; ++i) {
    if (w.l(i) > w.u(i)) {
      sol.status = Status::Infeasible;
      sol.note = "inconsistent bounds";
      sol.objective = std::numeric_limits<double>::quiet_NaN();
      return sol;
    }
  }

  double rho = settings.rho;
  const double sigma = settings.sigma;
  const double alpha = settings.over_relaxation;

  Eigen::MatrixXd kmat;
  Eigen::LLT<Eigen::MatrixXd> llt;
  auto factorize = [&]() -> bool {
    kmat = w.hs + sigma * Eigen::MatrixXd::Identity(n, n) +
           rho * (w.as.transpose() * w.as);
    llt.compute(kmat);
    if (llt.info() != Eigen::Success) {
      w.hs += kEpsReg * Eigen::MatrixXd::Identity(n, n);
      sol.regularized = true;
      kmat += kEpsReg * Eigen::MatrixXd::Identity(n, n);
      llt.compute(kmat);
      if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("hessian is not positive semidefinite");
      }
    }
    return true;
  };
  factorize();

  // scaled iterates
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd zv = w.ls.cwiseMax(Eigen::VectorXd::Zero(mt)).cwiseMin(w.us);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(mt);
  // A stale warm start whose shape no longer matches is ignored, not an error.
  if (warm.has_value() && warm->primal.size() == n && warm->dual.size() == mt &&
      warm->primal.allFinite() && warm->dual.allFinite()) {
    x = warm->primal.cwiseQuotient(w.d);
    y = w.c * warm->dual.cwiseQuotient(w.e);
    zv = (w.as * x).cwiseMax(w.ls).cwiseMin(w.us);
  }

  Eigen::VectorXd x_prev_check = x;
  Eigen::VectorXd y_un_prev = w.e.cwiseProduct(y) / w.c;

  Eigen::VectorXd xt(n), zt(mt), zcand(mt), rhs(n);
  int iter = 0;
  bool converged = false;

  for (iter = 1; iter <= settings.max_iterations; ++iter) {
    rhs = sigma * x - w.fs + w.as.transpose() * (rho * zv - y);
    xt = llt.solve(rhs);
    zt.noalias() = w.as * xt;
    x = alpha * xt + (1.0 - alpha) * x;
    zcand = alpha * zt + (1.0 - alpha) * zv + y / rho;
    zv = zcand.cwiseMax(w.ls).cwiseMin(w.us);
    y = rho * (zcand - zv);

    if (iter % settings.check_interval != 0 && iter != settings.max_iterations) continue;

    const Eigen::VectorXd z_un = w.d.cwiseProduct(x);
    const Eigen::VectorXd y_un = w.e.cwiseProduct(y) / w.c;
    const Eigen::VectorXd s_un = zv.cwiseQuotient(w.e);
    const double split_gap = inf_norm(w.a * z_un - s_un);
    const Stationarity st = stationarity_at(w, z_un, y_un);

    sol.primal = z_un;
    sol.dual = y_un;
    sol.primal_residual = std::max(split_gap, violation(w, z_un));
    sol.dual_residual = st.rel;

    if (sol.primal_residual <= settings.feas_tol && st.rel <= settings.kkt_tol) {
      converged = true;
      break;
    }
    if (primal_infeasibility_certificate(w, y_un - y_un_prev)) {
      sol.status = Status::Infeasible;
      sol.note = "primal infeasibility certificate";
      sol.objective = std::numeric_limits<double>::quiet_NaN();
      sol.iterations = iter;
      return sol;
    }
    if (dual_infeasibility_certificate(w, w.d.cwiseProduct(x - x_prev_check))) {
      sol.status = Status::MaxIterations;
      sol.note = "dual infeasibility certificate (objective unbounded below)";
      sol.iterations = iter;
      sol.objective = 0.5 * z_un.dot(w.h * z_un) + w.f.dot(z_un);
      return sol;
    }
    x_prev_check = x;
    y_un_prev = y_un;

    if (settings.adaptive_rho && iter >= 2 * settings.check_interval) {
      const double rp = split_gap / std::max({inf_norm(w.a * z_un), inf_norm(s_un), 1e-10});
      const Eigen::VectorXd hz = w.h * z_un;
      const Eigen::VectorXd aty = w.a.transpose() * y_un;
      const double rd = st.raw / std::max({inf_norm(hz), inf_norm(aty), inf_norm(w.f), 1e-10});
      const double scale = std::sqrt(rp / std::max(rd, 1e-12));
      const double rho_new = std::clamp(rho * scale, 1e-6, 1e6);
      if (rho_new > 5.0 * rho || rho_new < 0.2 * rho) {
        rho = rho_new;
        factorize();
      }
    }
  }

  sol.iterations = std::min(iter, settings.max_iterations);
  sol.status = converged ? Status::Optimal : Status::MaxIterations;
  if (!converged) sol.note = "iteration limit reached";

  if (converged && settings.polish) {
    const PolishResult pr = polish(w, sol.dual);
    if (pr.ok) {
      const double viol_pol = violation(w, pr.z);
      const Stationarity st_pol = stationarity_at(w, pr.z, pr.y);
      if (viol_pol <= sol.primal_residual + 1e-12 &&
          st_pol.rel <= sol.dual_residual + 1e-12) {
        sol.primal = pr.z;
        sol.dual = pr.y;
        sol.primal_residual = viol_pol;
        sol.dual_residual = st_pol.rel;
        sol.polished = true;
      }
    }
  }

  sol.objective = 0.5 * sol.primal.dot(w.h * sol.primal) + w.f.dot(sol.primal);
  return sol;
}

}  // namespace zonempc::qp
