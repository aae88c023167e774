#include "rsfilt/linalg.hpp"

#include "rsfilt/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rsfilt::linalg {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_psd(const Eigen::MatrixXd& m, const std::string& what, double rel_tol) {
  if (m.size() == 0) return;
  if (!m.allFinite()) throw NotPositiveSemidefinite(what + ": non-finite entries", std::nan(""));
  const double worst = min_eigenvalue(m);
  const double tol = rel_tol * std::abs(m.trace());
  if (worst < -tol) {
    std::ostringstream os;
    os << what << " is not positive semidefinite (worst eigenvalue " << worst << ")";
    throw NotPositiveSemidefinite(os.str(), worst);
  }
}

double condition_number(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double lo = sv(sv.size() - 1);
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / lo;
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

}  // namespace rsfilt::linalg
