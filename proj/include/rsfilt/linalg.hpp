#pragma once

#include <Eigen/Dense>

#include <string>

namespace rsfilt::linalg {

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const Eigen::MatrixXd& m);

/// Throws NotPositiveSemidefinite unless every eigenvalue of the symmetric
/// matrix `m` is at least -rel_tol * |trace(m)|.
void require_psd(const Eigen::MatrixXd& m, const std::string& what, double rel_tol = 1e-10);

/// Ratio of largest to smallest singular value; +inf when singular.
double condition_number(const Eigen::MatrixXd& m);

/// Returns L with L L' = m for a symmetric PSD matrix (eigenvalues below zero
/// are clamped). L is square and not triangular.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m);

/// Symmetrize in place: (m + m') / 2.
inline void symmetrize(Eigen::MatrixXd& m) { m = (0.5 * (m + m.transpose())).eval(); }

}  // namespace rsfilt::linalg
