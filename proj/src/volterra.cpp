#include "rsfilt/volterra.hpp"

#include "aux_rows.hpp"
#include "rsfilt/errors.hpp"
#include "rsfilt/linalg.hpp"

#include <cmath>
#include <sstream>

namespace rsfilt {

namespace {

void mark_violation(VolterraSolution& sol, int step, std::string clause) {
  sol.feasible = false;
  sol.first_violation = step;
  sol.violated_clause = std::move(clause);
}

void require_same_horizon(const GaussianModel& model, int risk_horizon) {
  if (risk_horizon != model.horizon()) throw DimensionMismatch("risk weights and model have different horizons");
}

// Checks the diagonal block of a matrix solution; returns false on violation.
bool check_diag_block(VolterraSolution& sol, int step, const Eigen::MatrixXd& block) {
  const double floor = -kFeasibilityTol * std::max(1.0, std::abs(block.trace()));
  if (linalg::min_eigenvalue(block) < floor) {
    mark_violation(sol, step, "gamma_t positive semidefinite");
    return false;
  }
  return true;
}

}  // namespace

VolterraSolution solve_volterra(const GaussianModel& model, const RiskSpec& risk) {
  if (!model.is_scalar()) throw DimensionMismatch("solve_volterra requires a scalar model without cross covariance");
  require_same_horizon(model, risk.horizon());
  const int T = model.horizon();

  VolterraSolution sol;
  sol.horizon = T;
  sol.dim = 1;
  sol.gamma = Eigen::MatrixXd::Zero(T, T);
  sol.S = risk.S(model.scalar_gains());
  Eigen::VectorXd weight(T);  // S_l / (1 + S_l gamma_l)

  auto& g = sol.gamma;
  for (int s = 0; s < T; ++s) {
    for (int t = s; t < T; ++t) {
      double acc = model.cov()(t, s);
      for (int l = 0; l < s; ++l) acc -= g(t, l) * g(s, l) * weight(l);
      g(t, s) = acc;
      if (t == s) {
        if (acc < -kFeasibilityTol) {
          g(t, s) = 0.0;
          mark_violation(sol, s + 1, "gamma_t >= 0");
          return sol;
        }
        const double denom = 1.0 + sol.S(s) * acc;
        if (denom <= kFeasibilityTol) {
          mark_violation(sol, s + 1, "1 + S_t gamma_t > 0");
          return sol;
        }
        weight(s) = sol.S(s) / denom;
      }
    }
  }
  return sol;
}

VolterraSolution solve_volterra_matrix(const GaussianModel& model, const MatrixRiskSpec& risk) {
  if (model.has_cross_cov())
    throw DimensionMismatch("solve_volterra_matrix requires independent noise; use solve_volterra_correlated");
  require_same_horizon(model, risk.horizon());
  const int T = model.horizon(), n = model.state_dim();
  for (const auto& q : risk.Q())
    if (q.rows() != n) throw DimensionMismatch("Q_t must be n x n");

  VolterraSolution sol;
  sol.horizon = T;
  sol.dim = n;
  sol.gamma = Eigen::MatrixXd::Zero(T * n, T * n);
  std::vector<Eigen::MatrixXd> weight(T);  // (I + Sbar_l gamma_l)^{-1} Sbar_l
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  auto blk = [&](int t, int s) { return sol.gamma.block(t * n, s * n, n, n); };
  for (int s = 0; s < T; ++s) {
    for (int t = s; t < T; ++t) {
      Eigen::MatrixXd acc = model.cov().block(t * n, s * n, n, n);
      for (int l = 0; l < s; ++l) acc -= blk(t, l) * weight[l] * blk(s, l).transpose();
      if (t == s) linalg::symmetrize(acc);
      blk(t, s) = acc;
      if (t == s) {
        if (!check_diag_block(sol, s + 1, acc)) {
          blk(t, s).setZero();
          return sol;
        }
        const Eigen::MatrixXd& A = model.gain(s + 1);
        const Eigen::MatrixXd Sbar = A.transpose() * A - risk.mu() * risk.Q(s + 1);
        const Eigen::MatrixXd inner = id + Sbar * acc;
        if (inner.determinant() <= kFeasibilityTol) {
          mark_violation(sol, s + 1, "det(I + gamma_t Sbar_t) > 0");
          return sol;
        }
        if (linalg::condition_number(inner) > kConditionLimit)
          throw SingularInnovationMatrix("innovation matrix is singular at step " + std::to_string(s + 1), s + 1);
        weight[s] = inner.partialPivLu().solve(Sbar);
        weight[s] = (0.5 * (weight[s] + weight[s].transpose())).eval();
      }
    }
  }
  return sol;
}

VolterraSolution solve_volterra_correlated(const GaussianModel& model, const MatrixRiskSpec& risk) {
  require_same_horizon(model, risk.horizon());
  const int T = model.horizon(), n = model.state_dim();
  for (const auto& q : risk.Q())
    if (q.rows() != n) throw DimensionMismatch("Q_t must be n x n");

  VolterraSolution sol;
  sol.horizon = T;
  sol.dim = n;
  sol.gamma = Eigen::MatrixXd::Zero(T * n, T * n);

  std::vector<detail::AugmentedRows> rows(T);
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> innovation(T);
  auto blk = [&](int t, int s) { return sol.gamma.block(t * n, s * n, n, n); };
  // Kbar(t, l) = [K_Xeps(t, l), 0]
  auto kbar = [&](int t, int l) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, rows[l].Abar.rows());
    out.leftCols(model.obs_dim()) = model.cross_block(t + 1, l + 1);
    return out;
  };
  auto gain_num = [&](int t, int l) -> Eigen::MatrixXd {
    return blk(t, l) * rows[l].Abar.transpose() + kbar(t, l);
  };

  for (int s = 0; s < T; ++s) {
    for (int t = s; t < T; ++t) {
      Eigen::MatrixXd acc = model.cov().block(t * n, s * n, n, n);
      for (int l = 0; l < s; ++l) acc -= gain_num(t, l) * innovation[l].solve(gain_num(s, l).transpose());
      if (t == s) linalg::symmetrize(acc);
      blk(t, s) = acc;
      if (t == s) {
        if (!check_diag_block(sol, s + 1, acc)) {
          blk(t, s).setZero();
          return sol;
        }
        rows[s] = detail::augmented_rows(model.gain(s + 1), risk.Q(s + 1), risk.mu());
        const auto& Ab = rows[s].Abar;
        const Eigen::MatrixXd ks = kbar(s, s);
        Eigen::MatrixXd V = Ab * acc * Ab.transpose() + Ab * ks + ks.transpose() * Ab.transpose();
        V.diagonal() += rows[s].noise;
        linalg::symmetrize(V);
        // det(V) / det(Rbar) reduces to 1 + S_t gamma_t in the scalar case.
        const double ratio = V.determinant() / rows[s].noise.prod();
        if (!(ratio > kFeasibilityTol)) {
          mark_violation(sol, s + 1, "det(Rbar_t + Abar_t gamma_t Abar_t' + ...) / det(Rbar_t) > 0");
          return sol;
        }
        if (linalg::condition_number(V) > kConditionLimit)
          throw SingularInnovationMatrix("innovation matrix is singular at step " + std::to_string(s + 1), s + 1);
        innovation[s] = V.partialPivLu();
      }
    }
  }
  return sol;
}

void require_feasible(const VolterraSolution& solution) {
  if (solution.feasible) return;
  const int step = solution.first_violation.value_or(0);
  std::ostringstream os;
  os << "feasibility condition violated at t = " << step << ": " << solution.violated_clause << " fails";
  throw InfeasibleCondition(os.str(), step, solution.violated_clause);
}

bool sufficient_condition(const GaussianModel& model, const RiskSpec& risk) {
  return (risk.S(model.scalar_gains()).array() >= 0.0).all();
}

Eigen::VectorXd ar1_riccati(const Eigen::VectorXd& a, const Eigen::VectorXd& D, const Eigen::VectorXd& A,
                            const Eigen::VectorXd& Q, double mu) {
  const int T = static_cast<int>(D.size());
  if (a.size() != T || A.size() != T || Q.size() != T) throw DimensionMismatch("ar1_riccati: length mismatch");
  Eigen::VectorXd g(T);
  double prev = 0.0, prev_S = 0.0;
  for (int s = 0; s < T; ++s) {
    if (D(s) < 0.0) throw NegativeVariance("D_" + std::to_string(s + 1) + " is negative");
    const double denom = 1.0 + prev_S * prev;
    if (s > 0 && denom <= kFeasibilityTol)
      throw InfeasibleCondition("ar1_riccati: 1 + S_t gamma_t <= 0 at t = " + std::to_string(s), s,
                                "1 + S_t gamma_t > 0");
    g(s) = D(s) + (s > 0 ? a(s) * a(s) * prev / denom : 0.0);
    prev = g(s);
    prev_S = A(s) * A(s) - mu * Q(s);
  }
  const double last = 1.0 + prev_S * prev;
  if (last <= kFeasibilityTol)
    throw InfeasibleCondition("ar1_riccati: 1 + S_t gamma_t <= 0 at t = " + std::to_string(T), T,
                              "1 + S_t gamma_t > 0");
  return g;
}

Eigen::VectorXd ma1_gamma(double lambda, const Eigen::VectorXd& A, const Eigen::VectorXd& Q, double mu) {
  const int T = static_cast<int>(A.size());
  if (Q.size() != T) throw DimensionMismatch("ma1_gamma: length mismatch");
  const double l2 = lambda * lambda;
  Eigen::VectorXd g(T);
  for (int t = 0; t < T; ++t) {
    if (t == 0) {
      g(t) = 1.0 + l2;
    } else {
      const double S = A(t - 1) * A(t - 1) - mu * Q(t - 1);
      g(t) = 1.0 + l2 - l2 * S / (1.0 + S * g(t - 1));
    }
    if (g(t) < -kFeasibilityTol)
      throw InfeasibleCondition("ma1_gamma: gamma_t < 0 at t = " + std::to_string(t + 1), t + 1, "gamma_t >= 0");
    const double S = A(t) * A(t) - mu * Q(t);
    if (1.0 + S * g(t) <= kFeasibilityTol)
      throw InfeasibleCondition("ma1_gamma: 1 + S_t gamma_t <= 0 at t = " + std::to_string(t + 1), t + 1,
                                "1 + S_t gamma_t > 0");
  }
  return g;
}

}  // namespace rsfilt
