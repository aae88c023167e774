#pragma once

// Augmented observation rows used by the vector recursions. The weight
// -mu Q_l acts as an extra observation of X_l: with -mu Q_l = U diag(d) U'
// the rows are d_i u_i' with noise variance d_i, so that
//   Abar' Rbar^{-1} Abar = A_l' A_l - mu Q_l.
// Negative d_i (mu > 0) keep the same algebra.

#include <Eigen/Dense>

namespace rsfilt::detail {

struct AugmentedRows {
  Eigen::MatrixXd Abar;     // (m + r) x n
  Eigen::VectorXd noise;    // diagonal of Rbar, length m + r
  int obs_rows = 0;         // m
};

inline AugmentedRows augmented_rows(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q, double mu) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  Eigen::MatrixXd weight = -mu * Q;
  weight = (0.5 * (weight + weight.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(weight);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  int r = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()(i)) > 1e-14 * scale && scale > 0.0) ++r;

  AugmentedRows rows;
  rows.obs_rows = m;
  rows.Abar = Eigen::MatrixXd::Zero(m + r, n);
  rows.noise = Eigen::VectorXd::Ones(m + r);
  rows.Abar.topRows(m) = A;
  int k = m;
  for (int i = 0; i < n; ++i) {
    const double d = es.eigenvalues()(i);
    if (!(std::abs(d) > 1e-14 * scale && scale > 0.0)) continue;
    rows.Abar.row(k) = d * es.eigenvectors().col(i).transpose();
    rows.noise(k) = d;
    ++k;
  }
  return rows;
}

}  // namespace rsfilt::detail
