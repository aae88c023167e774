#pragma once

// Conditional Cameron-Martin factorization of
//   I_t = E[exp{(mu/2) sum_{s<=t} Q_s (X_s - h_s)^2} | Y_1..Y_t]
// into explicit per-step factors and a martingale M_t driven by the
// innovations. Values are kept in log space.

#include "rsfilt/model.hpp"
#include "rsfilt/oracle.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace rsfilt {

struct CMDecomposition {
  Eigen::VectorXd log_I;       // log I_t
  Eigen::VectorXd log_M;       // log M_t
  Eigen::VectorXd nu;          // innovations
  Eigen::VectorXd pred;        // risk-neutral predictor of X_t given Y_1..Y_{t-1}
  Eigen::VectorXd gamma;       // its error variance
  Eigen::VectorXd gamma_bar;
  Eigen::VectorXd Z_h;
  Eigen::VectorXd Z_tilde;
  Eigen::VectorXd gamma_tilde;
  Eigen::VectorXd log_factor;  // log of the deterministic per-step factor
  Eigen::VectorXd exponent;    // per-step quadratic exponent in h_t - Z~_t

  int horizon() const noexcept { return static_cast<int>(log_I.size()); }
  double I_T() const { return std::exp(log_I(log_I.size() - 1)); }
  double M_T() const { return std::exp(log_M(log_M.size() - 1)); }
};

/// Structural scalar model; h is the realized estimate sequence.
CMDecomposition cm_decompose(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& Y,
                             const Eigen::VectorXd& h);

/// log M_t / M_{t-1} from step-t quantities only.
double log_martingale_increment(double A, double nu, double Z, double pred, double gamma, double gamma_bar);

struct MartingaleCheck {
  double estimate;
  double std_error;
  int n_paths;
};

/// Monte Carlo mean of M_T with h the optimal filter of the same risk spec.
MartingaleCheck martingale_expectation_check(const GaussianModel& model, const RiskSpec& risk, int n_paths,
                                             std::uint64_t seed);

/// Unnormalized conditional density of X_t tilted by the cost up to t-1:
///   lambda_t(x) = weight * N(x; center, variance).
struct InfoStateDensity {
  double center;
  double variance;
  double log_weight;

  double weight() const { return std::exp(log_weight); }
  double operator()(double x) const;
};

InfoStateDensity info_state(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& Y,
                            const Eigen::VectorXd& h, int t);

/// Factorization for an arbitrary jointly Gaussian (X, Y) given by its joint
/// law (labels X1..XT, Y1..YT); all moments come from exact conditioning.
CMDecomposition cm_general(const JointGaussian& joint, const RiskSpec& risk, const Eigen::VectorXd& Y,
                           const Eigen::VectorXd& h);

/// E exp{-D U^2 / 2 + l1 U - l2 V} for a Gaussian pair (U, V).
double gaussian_pair_exp(double mU, double mV, double gU, double gV, double gUV, double D, double l1, double l2);

}  // namespace rsfilt
