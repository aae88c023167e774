#include "rsfilt/model.hpp"

#include "rsfilt/errors.hpp"
#include "rsfilt/linalg.hpp"
#include "rsfilt/rng.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace rsfilt {

namespace {

void require_length(const Eigen::VectorXd& v, int T, const char* name) {
  if (v.size() != T) {
    std::ostringstream os;
    os << name << " has length " << v.size() << ", expected " << T;
    throw DimensionMismatch(os.str());
  }
}

// Symmetric matrix built from the lower triangle of `k`.
Eigen::MatrixXd from_lower(const Eigen::MatrixXd& k) {
  Eigen::MatrixXd full = k.triangularView<Eigen::Lower>();
  full.triangularView<Eigen::StrictlyUpper>() = full.transpose().triangularView<Eigen::StrictlyUpper>();
  return full;
}

}  // namespace

Eigen::VectorXd GaussianModel::scalar_gains() const {
  if (state_dim_ != 1 || obs_dim_ != 1) throw DimensionMismatch("scalar_gains requires n = m = 1");
  Eigen::VectorXd a(horizon_);
  for (int t = 0; t < horizon_; ++t) a(t) = gains_[t](0, 0);
  return a;
}

Eigen::MatrixXd GaussianModel::cross_block(int t, int s) const {
  if (!cross_cov_) return Eigen::MatrixXd::Zero(state_dim_, obs_dim_);
  return cross_cov_->block((t - 1) * state_dim_, (s - 1) * obs_dim_, state_dim_, obs_dim_);
}

RiskSpec::RiskSpec(double mu, Eigen::VectorXd Q) : mu_(mu), Q_(std::move(Q)) {
  if (!std::isfinite(mu_)) throw DomainError("risk parameter mu must be finite");
  for (int t = 0; t < Q_.size(); ++t) {
    if (!(Q_(t) >= 0.0) || !std::isfinite(Q_(t))) {
      std::ostringstream os;
      os << "Q_" << t + 1 << " = " << Q_(t) << " must be finite and nonnegative";
      throw DomainError(os.str());
    }
  }
}

Eigen::VectorXd RiskSpec::S(const Eigen::VectorXd& A) const {
  require_length(A, horizon(), "A");
  return (A.array().square() - mu_ * Q_.array()).matrix();
}

MatrixRiskSpec::MatrixRiskSpec(double mu, std::vector<Eigen::MatrixXd> Q) : mu_(mu), Q_(std::move(Q)) {
  if (!std::isfinite(mu_)) throw DomainError("risk parameter mu must be finite");
  for (std::size_t t = 0; t < Q_.size(); ++t) {
    if (Q_[t].rows() != Q_[t].cols()) throw DimensionMismatch("Q_t must be square");
    if ((Q_[t] - Q_[t].transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q_[t].cwiseAbs().maxCoeff()))
      throw DomainError("Q_t must be symmetric");
    linalg::require_psd(Q_[t], "Q_" + std::to_string(t + 1));
  }
}

MatrixRiskSpec MatrixRiskSpec::from_scalar(const RiskSpec& risk) {
  std::vector<Eigen::MatrixXd> q;
  q.reserve(risk.horizon());
  for (int t = 0; t < risk.horizon(); ++t) q.push_back(Eigen::MatrixXd::Constant(1, 1, risk.Q()(t)));
  return MatrixRiskSpec(risk.mu(), std::move(q));
}

GaussianModel build_vector_model(const Eigen::VectorXd& mean, const Eigen::MatrixXd& K,
                                 const std::vector<Eigen::MatrixXd>& gains,
                                 const std::optional<Eigen::MatrixXd>& cross_cov) {
  const int T = static_cast<int>(gains.size());
  if (T < 1) throw DimensionMismatch("horizon must be at least 1");
  const int m = static_cast<int>(gains[0].rows());
  const int n = static_cast<int>(gains[0].cols());
  if (n < 1 || m < 1) throw DimensionMismatch("gain matrices must be non-empty");
  for (const auto& g : gains) {
    if (g.rows() != m || g.cols() != n) throw DimensionMismatch("all gains must share the shape m x n");
    if (!g.allFinite()) throw DomainError("gains must be finite");
  }
  if (mean.size() != T * n) throw DimensionMismatch("mean must have length T*n");
  if (K.rows() != T * n || K.cols() != T * n) throw DimensionMismatch("covariance must be Tn x Tn");
  if (!mean.allFinite() || !K.allFinite()) throw DomainError("mean and covariance must be finite");

  GaussianModel model;
  model.horizon_ = T;
  model.state_dim_ = n;
  model.obs_dim_ = m;
  model.mean_ = mean;
  model.cov_ = from_lower(K);
  model.gains_ = gains;

  for (int i = 0; i < T * n; ++i) {
    if (model.cov_(i, i) < 0.0) {
      std::ostringstream os;
      os << "negative variance " << model.cov_(i, i) << " at coordinate " << i + 1;
      throw NotPositiveSemidefinite(os.str(), model.cov_(i, i));
    }
  }
  linalg::require_psd(model.cov_, "signal covariance K");

  if (cross_cov) {
    const Eigen::MatrixXd& c = *cross_cov;
    if (c.rows() != T * n || c.cols() != T * m) throw DimensionMismatch("cross covariance must be Tn x Tm");
    if (!c.allFinite()) throw DomainError("cross covariance must be finite");
    for (int t = 1; t <= T; ++t)
      for (int s = t + 1; s <= T; ++s)
        if (c.block((t - 1) * n, (s - 1) * m, n, m).cwiseAbs().maxCoeff() > 0.0)
          throw DimensionMismatch("cross covariance must be causal: K_Xeps(t, s) = 0 for t < s");
    Eigen::MatrixXd joint(T * (n + m), T * (n + m));
    joint << model.cov_, c, c.transpose(), Eigen::MatrixXd::Identity(T * m, T * m);
    linalg::require_psd(joint, "joint (X, eps) covariance");
    model.cross_cov_ = c;
  }
  return model;
}

GaussianModel build_general(const Eigen::VectorXd& m, const Eigen::MatrixXd& K, const Eigen::VectorXd& A) {
  const int T = static_cast<int>(A.size());
  require_length(m, T, "m");
  if (K.rows() != T || K.cols() != T) throw DimensionMismatch("K must be T x T");
  std::vector<Eigen::MatrixXd> gains;
  gains.reserve(T);
  for (int t = 0; t < T; ++t) gains.push_back(Eigen::MatrixXd::Constant(1, 1, A(t)));
  return build_vector_model(m, K, gains);
}

GaussianModel build_ar1(const Eigen::VectorXd& a, const Eigen::VectorXd& D, double x0, const Eigen::VectorXd& A) {
  const int T = static_cast<int>(A.size());
  require_length(a, T, "a");
  require_length(D, T, "D");
  for (int t = 0; t < T; ++t)
    if (D(t) < 0.0) throw NegativeVariance("D_" + std::to_string(t + 1) + " is negative");

  // k_t = a_t^2 k_{t-1} + D_t; K(t,s) = (prod_{u=s+1}^t a_u) k_s.
  Eigen::VectorXd mean(T), k(T);
  double lambda = 1.0, prev = 0.0;
  for (int t = 0; t < T; ++t) {
    lambda *= a(t);
    mean(t) = lambda * x0;
    k(t) = a(t) * a(t) * prev + D(t);
    prev = k(t);
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(T, T);
  for (int s = 0; s < T; ++s) {
    double ratio = 1.0;
    for (int t = s; t < T; ++t) {
      if (t > s) ratio *= a(t);
      K(t, s) = ratio * k(s);
    }
  }
  return build_general(mean, K, A);
}

GaussianModel build_ma1(double lambda, const Eigen::VectorXd& A) {
  const int T = static_cast<int>(A.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(T, T);
  for (int t = 0; t < T; ++t) {
    K(t, t) = 1.0 + lambda * lambda;
    if (t > 0) K(t, t - 1) = lambda;
  }
  return build_general(Eigen::VectorXd::Zero(T), K, A);
}

GaussianModel build_ma1_observation_preset(double lambda, const Eigen::VectorXd& alpha, double beta) {
  const int T = static_cast<int>(alpha.size());
  const int n = 2;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(T * n, T * n);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(T * n, T);
  std::vector<Eigen::MatrixXd> gains;
  for (int t = 0; t < T; ++t) {
    K(n * t, n * t) = 1.0 + lambda * lambda;
    if (t > 0) K(n * t, n * (t - 1)) = lambda;
    K(n * t + 1, n * t + 1) = 1.0;
    // second state component eps_{t-1} is the observation noise of step t-1
    if (t > 0) C(n * t + 1, t - 1) = 1.0;
    Eigen::MatrixXd g(1, 2);
    g << alpha(t), beta;
    gains.push_back(g);
  }
  return build_vector_model(Eigen::VectorXd::Zero(T * n), K, gains, C);
}

GaussianModel build_ar1_noise_preset(const Eigen::VectorXd& a, double b, const Eigen::VectorXd& alpha, double beta) {
  const int T = static_cast<int>(alpha.size());
  require_length(a, T, "a");
  const int n = 2;
  // signal: k_t = a_t^2 k_{t-1} + 1; noise state eta_{t-1}: v_t = Var(eta_{t-1}).
  Eigen::VectorXd k(T), v(T);
  for (int t = 0; t < T; ++t) {
    k(t) = a(t) * a(t) * (t > 0 ? k(t - 1) : 0.0) + 1.0;
    v(t) = t > 0 ? b * b * v(t - 1) + 1.0 : 0.0;
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(T * n, T * n);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(T * n, T);
  std::vector<Eigen::MatrixXd> gains;
  for (int s = 0; s < T; ++s) {
    double ratio = 1.0, bpow = 1.0;
    for (int t = s; t < T; ++t) {
      if (t > s) {
        ratio *= a(t);
        bpow *= b;
      }
      K(n * t, n * s) = ratio * k(s);
      K(n * t + 1, n * s + 1) = bpow * v(s);
    }
  }
  for (int t = 0; t < T; ++t) {
    // eta_{t-1} = sum_{j<t} b^{t-1-j} w_j
    double bpow = 1.0;
    for (int s = t - 1; s >= 0; --s) {
      C(n * t + 1, s) = bpow;
      bpow *= b;
    }
    Eigen::MatrixXd g(1, 2);
    g << alpha(t), beta;
    gains.push_back(g);
  }
  return build_vector_model(Eigen::VectorXd::Zero(T * n), K, gains, C);
}

PathSampler::PathSampler(const GaussianModel& model) : model_(model) {
  const int T = model.horizon(), n = model.state_dim(), m = model.obs_dim();
  const int dim = T * (n + m);
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(dim, dim);
  joint.topLeftCorner(T * n, T * n) = model.cov();
  joint.bottomRightCorner(T * m, T * m).setIdentity();
  if (model.cross_cov()) {
    joint.topRightCorner(T * n, T * m) = *model.cross_cov();
    joint.bottomLeftCorner(T * m, T * n) = model.cross_cov()->transpose();
  }
  joint.diagonal().array() += 1e-12 * joint.trace();
  Eigen::LLT<Eigen::MatrixXd> llt(joint);
  if (llt.info() != Eigen::Success) throw FactorizationFailure("joint (X, eps) covariance could not be factored");
  factor_ = llt.matrixL();
}

void PathSampler::draw(std::uint64_t path_seed, Eigen::VectorXd& X, Eigen::VectorXd& Y) const {
  const int T = model_.horizon(), n = model_.state_dim(), m = model_.obs_dim();
  SplitMix64 gen(path_seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(T * (n + m));
  for (int i = 0; i < z.size(); ++i) z(i) = normal(gen);
  Eigen::VectorXd joint = factor_.triangularView<Eigen::Lower>() * z;
  X = model_.mean() + joint.head(T * n);
  Y.resize(T * m);
  for (int t = 0; t < T; ++t)
    Y.segment(t * m, m) = model_.gains()[t] * X.segment(t * n, n) + joint.segment(T * n + t * m, m);
}

std::vector<Trajectory> sample(const GaussianModel& model, std::uint64_t seed, int n_paths) {
  std::vector<Trajectory> out;
  if (n_paths <= 0) return out;
  PathSampler sampler(model);
  out.resize(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    out[i].seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    sampler.draw(out[i].seed, out[i].X, out[i].Y);
  }
  return out;
}

}  // namespace rsfilt
