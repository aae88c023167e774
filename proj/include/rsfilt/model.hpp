#pragma once

// Signal-observation models  Y_t = A_t X_t + eps_t  with a Gaussian signal X.
//
// Time is 1-indexed in every accessor that takes a time argument (t, s >= 1),
// mirroring the usual filtering notation. Stacked Eigen storage is 0-indexed:
// time t occupies rows [(t-1)*n, t*n) of the signal vectors.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace rsfilt {

class GaussianModel {
 public:
  int horizon() const noexcept { return horizon_; }
  int state_dim() const noexcept { return state_dim_; }
  int obs_dim() const noexcept { return obs_dim_; }

  /// Scalar signal, scalar observation, independent noise.
  bool is_scalar() const noexcept {
    return state_dim_ == 1 && obs_dim_ == 1 && !cross_cov_.has_value();
  }
  bool has_cross_cov() const noexcept { return cross_cov_.has_value(); }

  /// Stacked mean (length T*n).
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  /// Full symmetric signal covariance (Tn x Tn).
  const Eigen::MatrixXd& cov() const noexcept { return cov_; }
  /// Observation gains, one m x n matrix per step.
  const std::vector<Eigen::MatrixXd>& gains() const noexcept { return gains_; }
  /// E (X_t - m_t) eps_s', stacked (Tn x Tm); empty when noise is independent.
  const std::optional<Eigen::MatrixXd>& cross_cov() const noexcept { return cross_cov_; }

  // Scalar accessors (n = m = 1).
  double m(int t) const { return mean_(t - 1); }
  double K(int t, int s) const { return cov_(t - 1, s - 1); }
  double A(int t) const { return gains_[t - 1](0, 0); }
  Eigen::VectorXd scalar_gains() const;

  // Block accessors.
  Eigen::VectorXd mean_block(int t) const { return mean_.segment((t - 1) * state_dim_, state_dim_); }
  Eigen::MatrixXd cov_block(int t, int s) const {
    return cov_.block((t - 1) * state_dim_, (s - 1) * state_dim_, state_dim_, state_dim_);
  }
  const Eigen::MatrixXd& gain(int t) const { return gains_[t - 1]; }
  /// E (X_t - m_t) eps_s' (n x m); zero when noise is independent.
  Eigen::MatrixXd cross_block(int t, int s) const;

 private:
  GaussianModel() = default;

  friend GaussianModel build_vector_model(const Eigen::VectorXd&, const Eigen::MatrixXd&,
                                          const std::vector<Eigen::MatrixXd>&,
                                          const std::optional<Eigen::MatrixXd>&);

  int horizon_ = 0;
  int state_dim_ = 1;
  int obs_dim_ = 1;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  std::vector<Eigen::MatrixXd> gains_;
  std::optional<Eigen::MatrixXd> cross_cov_;
};

/// Risk parameter mu and nonnegative weights Q_t of the exponential criterion
/// E mu exp{(mu/2) sum_t Q_t (X_t - h_t)^2}.
class RiskSpec {
 public:
  RiskSpec(double mu, Eigen::VectorXd Q);

  double mu() const noexcept { return mu_; }
  const Eigen::VectorXd& Q() const noexcept { return Q_; }
  double Q(int t) const { return Q_(t - 1); }
  int horizon() const noexcept { return static_cast<int>(Q_.size()); }

  /// S_t = A_t^2 - mu Q_t.
  Eigen::VectorXd S(const Eigen::VectorXd& A) const;

 private:
  double mu_;
  Eigen::VectorXd Q_;
};

/// Vector-signal analogue: Q_t is a symmetric PSD n x n weight per step.
class MatrixRiskSpec {
 public:
  MatrixRiskSpec(double mu, std::vector<Eigen::MatrixXd> Q);
  /// Lifts a scalar risk spec to 1 x 1 weights.
  static MatrixRiskSpec from_scalar(const RiskSpec& risk);

  double mu() const noexcept { return mu_; }
  const std::vector<Eigen::MatrixXd>& Q() const noexcept { return Q_; }
  const Eigen::MatrixXd& Q(int t) const { return Q_[t - 1]; }
  int horizon() const noexcept { return static_cast<int>(Q_.size()); }

 private:
  double mu_;
  std::vector<Eigen::MatrixXd> Q_;
};

/// One sampled path. Stacked like the model (X: T*n, Y: T*m).
struct Trajectory {
  Eigen::VectorXd X;
  Eigen::VectorXd Y;
  std::uint64_t seed = 0;
};

GaussianModel build_general(const Eigen::VectorXd& m, const Eigen::MatrixXd& K, const Eigen::VectorXd& A);

/// X_t = a_t X_{t-1} + sqrt(D_t) e_t, X_0 = x0, with observation gains A.
GaussianModel build_ar1(const Eigen::VectorXd& a, const Eigen::VectorXd& D, double x0, const Eigen::VectorXd& A);

/// X_t = e_t + lambda e_{t-1}.
GaussianModel build_ma1(double lambda, const Eigen::VectorXd& A);

/// General vector model. `K` is the full Tn x Tn covariance (its lower block
/// triangle is authoritative), `cross_cov` is E (X_t - m_t) eps_s' (Tn x Tm).
/// Cross-covariance must be causal: K_Xeps(t, s) = 0 whenever t < s.
GaussianModel build_vector_model(const Eigen::VectorXd& mean, const Eigen::MatrixXd& K,
                                 const std::vector<Eigen::MatrixXd>& gains,
                                 const std::optional<Eigen::MatrixXd>& cross_cov = std::nullopt);

/// MA(1) signal with MA(1)-type observation noise:
///   X_t = e_t + lambda e_{t-1},  Y_t = alpha_t X_t + eps_t + beta eps_{t-1}.
/// State is (X_t, eps_{t-1}), gains (alpha_t, beta), observation noise eps_t.
GaussianModel build_ma1_observation_preset(double lambda, const Eigen::VectorXd& alpha, double beta);

/// AR(1) signal with AR(1) observation noise:
///   X_t = a_t X_{t-1} + e_t,  eta_t = b eta_{t-1} + w_t,
///   Y_t = alpha_t X_t + beta eta_{t-1} + w_t   (beta = b gives Y = alpha X + eta).
/// State is (X_t, eta_{t-1}), gains (alpha_t, beta), observation noise w_t.
GaussianModel build_ar1_noise_preset(const Eigen::VectorXd& a, double b, const Eigen::VectorXd& alpha, double beta);

/// Draws paths from a model. The joint (X, eps) covariance is factored once;
/// path i uses the stream derive_seed(seed, i), so draws are reproducible and
/// independent of how paths are partitioned across threads.
class PathSampler {
 public:
  explicit PathSampler(const GaussianModel& model);

  void draw(std::uint64_t path_seed, Eigen::VectorXd& X, Eigen::VectorXd& Y) const;
  const GaussianModel& model() const noexcept { return model_; }

 private:
  const GaussianModel& model_;
  Eigen::MatrixXd factor_;  // lower Cholesky factor of joint (X, eps) covariance
};

std::vector<Trajectory> sample(const GaussianModel& model, std::uint64_t seed, int n_paths);

/// Constant sequence helper.
inline Eigen::VectorXd constant(int T, double value) { return Eigen::VectorXd::Constant(T, value); }

}  // namespace rsfilt
