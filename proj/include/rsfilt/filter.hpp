#pragma once

// Optimal LEG / risk-sensitive filter and the auxiliary processes Z^h
// (predictor) and Z~^h (filtered) that carry the conditional Laplace
// transform. All sequences are 0-indexed Eigen vectors: element t-1 is time t.

#include "rsfilt/model.hpp"
#include "rsfilt/volterra.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>

namespace rsfilt {

struct FilterRun {
  Eigen::VectorXd h_bar;
  Eigen::VectorXd Z_h;
  Eigen::VectorXd Z_tilde;
  Eigen::VectorXd gamma_bar;    // diagonal gamma_t
  Eigen::VectorXd gamma_tilde;  // gamma_t / (1 + A_t^2 gamma_t)
  std::optional<double> risk;   // optimal risk, absent when mu = 0
};

/// Causal affine filter h_t = c_t + sum_{l <= t} G(t, l) Y_l (scalar model).
struct AffineFilter {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;  // lower triangular

  Eigen::VectorXd apply(const Eigen::VectorXd& Y) const { return c + G.triangularView<Eigen::Lower>() * Y; }
  int horizon() const noexcept { return static_cast<int>(c.size()); }
};

/// Recovers the affine coefficients of a filter that is affine in Y by
/// evaluating it on the zero sequence and on unit sequences.
AffineFilter extract_affine(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& filter, int T);

FilterRun leg_filter(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& Y);
FilterRun leg_filter(const GaussianModel& model, const RiskSpec& risk, const VolterraSolution& solution,
                     const Eigen::VectorXd& Y);

/// mu * prod_t [(1 + S_t gamma_t) / (1 + A_t^2 gamma_t)]^{-1/2}. Requires mu != 0.
double optimal_risk(const VolterraSolution& solution, const RiskSpec& risk, const Eigen::VectorXd& A);
/// log |optimal risk|.
double log_optimal_risk(const VolterraSolution& solution, const RiskSpec& risk, const Eigen::VectorXd& A);

/// Predictor Z^h_t for an arbitrary realized causal sequence h.
Eigen::VectorXd z_h(const GaussianModel& model, const RiskSpec& risk, const VolterraSolution& solution,
                    const Eigen::VectorXd& Y, const Eigen::VectorXd& h);

struct ZTilde {
  Eigen::VectorXd Z_tilde;
  Eigen::VectorXd gamma_tilde;
};

/// Filtered Z~^h_t and gamma~_t. Computed both by its own recursion and from
/// Z^h; throws InconsistentRecursion if the two disagree.
ZTilde z_tilde(const GaussianModel& model, const RiskSpec& risk, const VolterraSolution& solution,
               const Eigen::VectorXd& Y, const Eigen::VectorXd& h);

/// O(T) AR(1) form of the optimal filter, h_0 = x0.
FilterRun ar1_filter(const Eigen::VectorXd& a, const Eigen::VectorXd& D, double x0, const Eigen::VectorXd& A,
                     const Eigen::VectorXd& Q, double mu, const Eigen::VectorXd& Y);

/// O(T) MA(1) form of the optimal filter, h_0 = 0.
FilterRun ma1_filter(double lambda, const Eigen::VectorXd& A, const Eigen::VectorXd& Q, double mu,
                     const Eigen::VectorXd& Y);

/// E[X_t | Y_1..Y_t]: the mu = 0 filter.
Eigen::VectorXd risk_neutral_filter(const GaussianModel& model, const Eigen::VectorXd& Y);

/// Risk-neutral one-step predictor E[X_t | Y_1..Y_{t-1}] and its error variance.
struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};
Prediction risk_neutral_prediction(const GaussianModel& model, const Eigen::VectorXd& Y);

struct VectorFilterRun {
  Eigen::VectorXd h_bar;  // stacked, T*n
  Eigen::VectorXd Z;      // predictor Z^{h_bar}, stacked
  VolterraSolution solution;
};

/// Optimal filter for vector models, with or without correlated noise.
VectorFilterRun filter_correlated(const GaussianModel& model, const MatrixRiskSpec& risk, const Eigen::VectorXd& Y);

/// Vector predictor Z^h for an arbitrary realized sequence h (stacked T*n).
Eigen::VectorXd vector_z_h(const GaussianModel& model, const MatrixRiskSpec& risk, const VolterraSolution& solution,
                           const Eigen::VectorXd& Y, const Eigen::VectorXd& h);

}  // namespace rsfilt
