#pragma once

// Shared generators and independent reference computations for the tests.

#include "rsfilt/cameron_martin.hpp"
#include "rsfilt/errors.hpp"
#include "rsfilt/filter.hpp"
#include "rsfilt/model.hpp"
#include "rsfilt/oracle.hpp"
#include "rsfilt/volterra.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline VectorXd uniform_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

inline VectorXd normal_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

/// Random SPD covariance B B' + jitter I.
inline MatrixXd random_cov(std::mt19937_64& rng, int n, double jitter = 0.1) {
  MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = uniform(rng, -1.0, 1.0);
  return B * B.transpose() + jitter * MatrixXd::Identity(n, n);
}

/// Gains bounded away from zero with random sign.
inline VectorXd random_gains(std::mt19937_64& rng, int T) {
  VectorXd A(T);
  for (int t = 0; t < T; ++t) A(t) = uniform(rng, 0.5, 1.5) * (uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0);
  return A;
}

inline rsfilt::GaussianModel random_general(std::mt19937_64& rng, int T) {
  return rsfilt::build_general(uniform_vec(rng, T, -1, 1), random_cov(rng, T), random_gains(rng, T));
}

/// Observations drawn from the model itself.
inline VectorXd draw_Y(const rsfilt::GaussianModel& model, std::uint64_t seed) {
  return rsfilt::sample(model, seed, 1).front().Y;
}

/// Random scalar model with a feasible risk spec at the given mu.
struct Instance {
  rsfilt::GaussianModel model;
  rsfilt::RiskSpec risk;
};

inline Instance random_feasible(std::mt19937_64& rng, int T, double mu) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto model = random_general(rng, T);
    rsfilt::RiskSpec risk(mu, uniform_vec(rng, T, 0.2, 1.5));
    if (rsfilt::solve_volterra(model, risk).feasible) return {model, risk};
  }
  throw std::runtime_error("no feasible instance found");
}

/// Gauss-Hermite nodes and weights for integrals against exp(-x^2) (Golub-Welsch).
inline std::pair<VectorXd, VectorXd> gauss_hermite(int n) {
  MatrixXd J = MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  VectorXd w = std::sqrt(std::numbers::pi) * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

/// E f(Z) for Z ~ N(mean, cov) in two dimensions by tensor Gauss-Hermite.
inline double gh_expect_2d(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                           const std::function<double(double, double)>& f, int n = 80) {
  const auto [x, w] = gauss_hermite(n);
  const Eigen::Matrix2d L = cov.llt().matrixL();
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d z = mean + std::sqrt(2.0) * L * Eigen::Vector2d(x(i), x(j));
      acc += w(i) * w(j) * f(z(0), z(1));
    }
  return acc / std::numbers::pi;
}

/// log E exp{-1/2 y'Hy + b'y + c} for y ~ N(m, S), by completing the square.
inline double log_exp_quadratic(const VectorXd& m, const MatrixXd& S, const MatrixXd& H, const VectorXd& b, double c) {
  const int n = static_cast<int>(m.size());
  const MatrixXd L = S.llt().matrixL();
  const MatrixXd M = MatrixXd::Identity(n, n) + L.transpose() * H * L;
  const VectorXd g = L.transpose() * (b - H * m);
  const Eigen::LLT<MatrixXd> llt(M);
  const double logdet = 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * logdet + 0.5 * g.dot(llt.solve(g)) - 0.5 * m.dot(H * m) + b.dot(m) + c;
}

/// Coefficients (H, b, c) with f(y) = -1/2 y'Hy + b'y + c for a quadratic f, by
/// finite evaluation (exact for quadratics up to rounding).
struct Quadratic {
  MatrixXd H;
  VectorXd b;
  double c;
};

inline Quadratic fit_quadratic(const std::function<double(const VectorXd&)>& f, int n) {
  Quadratic q;
  const VectorXd zero = VectorXd::Zero(n);
  q.c = f(zero);
  q.b.resize(n);
  q.H.resize(n, n);
  VectorXd fp(n), fm(n);
  for (int i = 0; i < n; ++i) {
    VectorXd e = zero;
    e(i) = 1.0;
    fp(i) = f(e);
    fm(i) = f(-e);
    q.b(i) = 0.5 * (fp(i) - fm(i));
    q.H(i, i) = -(fp(i) + fm(i) - 2.0 * q.c);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      VectorXd e = zero;
      e(i) = 1.0;
      e(j) = 1.0;
      // f(ei + ej) = c + b_i + b_j - (H_ii + H_jj)/2 - H_ij
      q.H(i, j) = q.H(j, i) = -(f(e) - q.c - q.b(i) - q.b(j) + 0.5 * (q.H(i, i) + q.H(j, j)));
    }
  return q;
}

/// E[X | Y] for the scalar model by direct Schur complement, independent of
/// the library's conditioning code.
inline VectorXd direct_filtered_means(const rsfilt::GaussianModel& model, const VectorXd& Y) {
  const int T = model.horizon();
  const VectorXd A = model.scalar_gains();
  const MatrixXd K = model.cov();
  VectorXd out(T);
  for (int t = 1; t <= T; ++t) {
    const MatrixXd Kt = K.topLeftCorner(t, t);
    const MatrixXd Aa = A.head(t).asDiagonal();
    const MatrixXd Syy = Aa * Kt * Aa + MatrixXd::Identity(t, t);
    const VectorXd Sxy = (K.row(t - 1).head(t) * Aa).transpose();
    const VectorXd r = Y.head(t) - Aa * model.mean().head(t);
    out(t - 1) = model.mean()(t - 1) + Sxy.dot(Syy.ldlt().solve(r));
  }
  return out;
}

/// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

inline double max_abs_diff(const VectorXd& a, const VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Random causal h: affine in Y with random coefficients.
inline VectorXd random_causal_h(std::mt19937_64& rng, const VectorXd& Y) {
  const int T = static_cast<int>(Y.size());
  VectorXd h(T);
  for (int t = 0; t < T; ++t) {
    h(t) = uniform(rng, -0.5, 0.5);
    for (int l = 0; l <= t; ++l) h(t) += uniform(rng, -0.7, 0.7) * Y(l);
  }
  return h;
}

/// Exact E[M_T] with h = the optimal filter, by integrating exp(log M_T(Y))
/// against the Gaussian law of Y; log M_T is quadratic in Y.
inline double exact_martingale_mean(const rsfilt::GaussianModel& model, const rsfilt::RiskSpec& risk) {
  const int T = model.horizon();
  auto logM = [&](const VectorXd& Y) {
    const VectorXd h = rsfilt::leg_filter(model, risk, Y).h_bar;
    const auto cm = rsfilt::cm_decompose(model, risk, Y, h);
    return cm.log_M(T - 1);
  };
  const Quadratic q = fit_quadratic(logM, T);
  const VectorXd A = model.scalar_gains();
  const MatrixXd Aa = A.asDiagonal();
  const VectorXd mY = Aa * model.mean();
  const MatrixXd SY = Aa * model.cov() * Aa + MatrixXd::Identity(T, T);
  return std::exp(log_exp_quadratic(mY, SY, q.H, q.b, q.c));
}

}  // namespace testing
