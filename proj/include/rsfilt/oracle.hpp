#pragma once

// Exact joint-Gaussian reference computations used to verify the filter:
// conditioning, exponential-quadratic expectations, the auxiliary
// observation system, brute-force affine risk minimization and the
// random-walk example with a state penalty.

#include "rsfilt/filter.hpp"
#include "rsfilt/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace rsfilt {

/// Gaussian vector with labelled coordinates ("X1", "Y1", "Y2_1", "X1.0", ...).
struct JointGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::vector<std::string> labels;
  /// Observed coordinates dropped during conditioning because their variance was zero.
  std::vector<int> dropped;

  int size() const noexcept { return static_cast<int>(mean.size()); }
  int index(const std::string& label) const;
  std::vector<int> indices(const std::vector<std::string>& names) const;
};

std::string x_label(int t, int component = -1);
std::string y_label(int t, int component = -1);
std::string y2_label(int t);

/// Law of (X_1..X_T, Y_1..Y_T), with the observation noise included.
JointGaussian assemble_joint(const GaussianModel& model);

/// Conditional law given the observed coordinates. The result keeps every
/// coordinate; observed ones get their value and zero variance.
JointGaussian condition(const JointGaussian& joint, const std::vector<int>& observed,
                        const Eigen::VectorXd& values);

struct TiltResult {
  JointGaussian law;        // law reweighted by the exponential
  double log_normalizer;    // log E exp{-1/2 sum_i q_i (x_i - c_i)^2}
};

/// Reweights by exp{-1/2 sum q_i (x_i - c_i)^2} over `idx`; q may be negative.
/// Throws TransformDiverges when the expectation is infinite.
TiltResult tilt(const JointGaussian& joint, const std::vector<int>& idx, const Eigen::VectorXd& q,
                const Eigen::VectorXd& c);

/// log E[exp{(mu/2) sum_t Q_t (X_t - h_t)^2} | Y = Y_values] for a scalar joint
/// with labels X1..XT, Y1..YT.
double log_conditional_exp_quadratic(const JointGaussian& joint, const Eigen::VectorXd& Y_values,
                                     const RiskSpec& risk, const Eigen::VectorXd& h);
double conditional_exp_quadratic(const JointGaussian& joint, const Eigen::VectorXd& Y_values, const RiskSpec& risk,
                                 const Eigen::VectorXd& h);

/// Joint law of (X, Y, Y2) with Y2_t = q_t (X_t - h_t) + sqrt(q_t) e_t, q = -mu Q,
/// together with realized Y and Y2 values.
struct AugmentedSystem {
  JointGaussian joint;
  Eigen::VectorXd Y;
  Eigen::VectorXd Y2;
  Eigen::VectorXd h;
  int horizon = 0;

  /// Conditional law of X given Y_{<=y_upto} and Y2_{<=y2_upto}.
  JointGaussian conditional(int y_upto, int y2_upto) const;

  /// E[X_t | Y_{<t}, Y2_{<t}].
  double pi_bar_pred(int t) const;
  /// Var[X_t | Y_{<t}, Y2_{<t}].
  double gamma_bar(int t) const;
  /// Cov[X_t, xi_{t-1} | Y_{<t}, Y2_{<t}] with xi_{t-1} = sum_{s<t} (X_s - h_s) Y2_s.
  double gamma_xxi(int t) const;
  /// pi_bar_pred(t) - gamma_xxi(t).
  double z_h(int t) const;
  /// Same construction given Y_{<=t}, Y2_{<t}.
  double z_tilde(int t) const;
  double gamma_tilde(int t) const;
};

/// Requires mu <= 0. Y2 values are drawn from their conditional law given Y.
AugmentedSystem augmented_system(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& h,
                                 const Eigen::VectorXd& Y_values, std::uint64_t aux_seed);

/// Exact log E exp{(mu/2) [sum_t Q_t (X_t - h_t)^2 + P_t X_t^2]} for the affine
/// filter h = c + G Y (scalar model), unconditional in (X, Y).
double log_affine_exp_criterion(const GaussianModel& model, const RiskSpec& risk, const AffineFilter& filter,
                                const Eigen::VectorXd& state_penalty = Eigen::VectorXd());

struct AffineRiskOptions {
  double tolerance = 1e-9;
  int starts = 5;
  int max_evaluations = 100000;
  std::uint64_t seed = 1;
  /// Optional extra weights P_t on X_t^2 inside the exponent.
  Eigen::VectorXd state_penalty;
};

struct AffineRiskResult {
  AffineFilter coefficients;
  double risk;       // mu * E exp{...}
  double log_value;  // log E exp{...}
  int evaluations;
};

/// Minimizes the exact criterion over causal affine filters by pattern search,
/// starting from the conditional-mean filter.
AffineRiskResult minimize_affine_risk(const GaussianModel& model, const RiskSpec& risk,
                                      const AffineRiskOptions& options = {});
/// Same for any joint law with scalar coordinates labelled X1..XT, Y1..YT.
AffineRiskResult minimize_affine_risk(const JointGaussian& joint, const RiskSpec& risk,
                                      const AffineRiskOptions& options = {});

/// Sub-vector with the given coordinates, in the given order.
JointGaussian marginal(const JointGaussian& joint, const std::vector<int>& idx);

/// Coefficients of h_t = E[X_t | Y_1..Y_t] computed by conditioning.
AffineFilter conditional_mean_filter(const JointGaussian& joint, int T);

struct BackwardRiccati {
  int horizon;
  Eigen::VectorXd Gamma;          // recursion, Gamma(t-1) = Gamma(T, t)
  Eigen::VectorXd closed_form;    // solved Moebius form
  Eigen::VectorXd printed_form;   // 10 (l^T - l^t) / ((1 - sqrt5) l^T - (1 + sqrt5) l^t)
  double lambda_const;
  double max_discrepancy;         // recursion vs closed_form
  double printed_discrepancy;     // recursion vs printed_form
};

BackwardRiccati backward_riccati(int T);

/// Random walk X_t = X_{t-1} + e_t, X_0 = 0, Y_t = X_t + eps_t, mu = -1, criterion
/// exp{-1/2 sum [X_t^2 + (X_t - h_t)^2]}. Coefficients are those of Y_1 in h_1.
struct LegVsRsReport {
  int horizon;
  BackwardRiccati riccati;
  double stated_hbar1;            // (1 + Gamma(T,1)) / (2 + Gamma(T,1))
  double stated_hhat1;            // 1/4
  double transformed_model_hbar1; // AR(1) filter with a_t = D_t = 1/(1 + Gamma(T,t))
  double oracle_hbar1;            // LEG filter under the exactly reweighted law
  std::optional<double> brute_force_hbar1;  // minimize_affine_risk, T <= 3
  double oracle_hhat1;            // one-step conditional minimizer
  double pi1_over_1_plus_gamma1;  // pi_1(X_1) / (1 + gamma_1) with posterior gamma_1
  Eigen::VectorXd tilted_a;       // AR coefficients of the reweighted law (t >= 2)
  Eigen::VectorXd tilted_D;
  Eigen::VectorXd stated_a;       // 1/(1 + Gamma(T, t))
  bool differ;                    // oracle_hbar1 != oracle_hhat1
};

LegVsRsReport leg_vs_rs_example(int T);

}  // namespace rsfilt
