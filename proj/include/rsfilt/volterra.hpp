#pragma once

// Riccati-Volterra equation for the two-index covariance table gamma(t, s),
// 1 <= s <= t <= T, together with the feasibility condition
//   gamma_t = gamma(t, t) >= 0  and  1 + S_t gamma_t > 0,  S_t = A_t^2 - mu Q_t.

#include "rsfilt/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace rsfilt {

inline constexpr double kFeasibilityTol = 1e-12;
inline constexpr double kConditionLimit = 1e12;

struct VolterraSolution {
  int horizon = 0;
  int dim = 1;
  /// Lower block triangle of gamma (Tn x Tn); entries past a violation are zero.
  Eigen::MatrixXd gamma;
  /// S_t = A_t^2 - mu Q_t (scalar solver only).
  Eigen::VectorXd S;
  bool feasible = true;
  /// 1-indexed step of the first violation.
  std::optional<int> first_violation;
  /// Which inequality failed, e.g. "1 + S_t gamma_t > 0".
  std::string violated_clause;

  double gamma_bar(int t, int s) const { return gamma(t - 1, s - 1); }
  double diag(int t) const { return gamma(t - 1, t - 1); }
  Eigen::VectorXd diagonal() const { return gamma.diagonal(); }
  Eigen::MatrixXd block(int t, int s) const { return gamma.block((t - 1) * dim, (s - 1) * dim, dim, dim); }
};

/// Scalar recursion, filled column by column (increasing s, then t >= s).
VolterraSolution solve_volterra(const GaussianModel& model, const RiskSpec& risk);

/// Vector signal with independent observation noise.
VolterraSolution solve_volterra_matrix(const GaussianModel& model, const MatrixRiskSpec& risk);

/// Vector signal with causal cross-covariance between signal and noise.
VolterraSolution solve_volterra_correlated(const GaussianModel& model, const MatrixRiskSpec& risk);

/// Throws InfeasibleCondition describing the first violation.
void require_feasible(const VolterraSolution& solution);

/// Advisory sufficient condition for feasibility: A_t^2 - mu Q_t >= 0 for all t.
bool sufficient_condition(const GaussianModel& model, const RiskSpec& risk);

/// Diagonal gamma_t of the AR(1) model via the scalar Riccati map
///   gamma_s = D_s + a_s^2 gamma_{s-1} / (1 + S_{s-1} gamma_{s-1}),  gamma_0 = 0.
Eigen::VectorXd ar1_riccati(const Eigen::VectorXd& a, const Eigen::VectorXd& D, const Eigen::VectorXd& A,
                            const Eigen::VectorXd& Q, double mu);

/// Diagonal gamma_t of the MA(1) model:
///   gamma_t = 1 + lambda^2 - lambda^2 S_{t-1} / (1 + S_{t-1} gamma_{t-1}),  gamma_1 = 1 + lambda^2.
Eigen::VectorXd ma1_gamma(double lambda, const Eigen::VectorXd& A, const Eigen::VectorXd& Q, double mu);

}  // namespace rsfilt
