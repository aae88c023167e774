#include "rsfilt/filter.hpp"

#include "aux_rows.hpp"
#include "rsfilt/errors.hpp"

#include <cmath>

namespace rsfilt {

namespace {

void require_scalar(const GaussianModel& model, const char* who) {
  if (!model.is_scalar()) throw DimensionMismatch(std::string(who) + " requires a scalar model");
}

void require_length(const Eigen::VectorXd& v, int T, const char* what) {
  if (v.size() != T) throw DimensionMismatch(std::string(what) + " has length " + std::to_string(v.size()) +
                                             ", expected " + std::to_string(T));
}

double log_risk_from_diag(const Eigen::VectorXd& S, const Eigen::VectorXd& A, const Eigen::VectorXd& g) {
  double acc = 0.0;
  for (Eigen::Index t = 0; t < g.size(); ++t) acc += std::log1p(S(t) * g(t)) - std::log1p(A(t) * A(t) * g(t));
  return -0.5 * acc;
}

std::optional<double> risk_or_none(double mu, const Eigen::VectorXd& S, const Eigen::VectorXd& A,
                                   const Eigen::VectorXd& g) {
  if (mu == 0.0) return std::nullopt;
  return mu * std::exp(log_risk_from_diag(S, A, g));
}

Eigen::VectorXd tilde_variance(const Eigen::VectorXd& A, const Eigen::VectorXd& g) {
  return g.array() / (1.0 + A.array().square() * g.array());
}

}  // namespace

AffineFilter extract_affine(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& filter, int T) {
  AffineFilter out;
  Eigen::VectorXd Y = Eigen::VectorXd::Zero(T);
  out.c = filter(Y);
  require_length(out.c, T, "filter output");
  out.G = Eigen::MatrixXd::Zero(T, T);
  for (int l = 0; l < T; ++l) {
    Y.setZero();
    Y(l) = 1.0;
    const Eigen::VectorXd h = filter(Y);
    for (int t = l; t < T; ++t) out.G(t, l) = h(t) - out.c(t);
  }
  return out;
}

FilterRun leg_filter(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& Y) {
  require_scalar(model, "leg_filter");
  const VolterraSolution sol = solve_volterra(model, risk);
  require_feasible(sol);
  return leg_filter(model, risk, sol, Y);
}

FilterRun leg_filter(const GaussianModel& model, const RiskSpec& risk, const VolterraSolution& sol,
                     const Eigen::VectorXd& Y) {
  require_scalar(model, "leg_filter");
  require_feasible(sol);
  const int T = model.horizon();
  require_length(Y, T, "Y");
  if (sol.horizon != T) throw DimensionMismatch("solution horizon differs from model horizon");
  const Eigen::VectorXd A = model.scalar_gains();

  FilterRun run;
  run.h_bar.resize(T);
  for (int t = 0; t < T; ++t) {
    const double gt = sol.gamma(t, t);
    double acc = model.mean()(t) + A(t) * gt * Y(t);
    for (int l = 0; l < t; ++l) acc += A(l) * sol.gamma(t, l) * (Y(l) - A(l) * run.h_bar(l));
    run.h_bar(t) = acc / (1.0 + A(t) * A(t) * gt);
  }
  run.Z_h = z_h(model, risk, sol, Y, run.h_bar);
  const ZTilde zt = z_tilde(model, risk, sol, Y, run.h_bar);
  run.Z_tilde = zt.Z_tilde;
  run.gamma_bar = sol.diagonal();
  run.gamma_tilde = zt.gamma_tilde;
  run.risk = risk_or_none(risk.mu(), sol.S, A, run.gamma_bar);
  return run;
}

double log_optimal_risk(const VolterraSolution& sol, const RiskSpec& risk, const Eigen::VectorXd& A) {
  require_feasible(sol);
  require_length(A, sol.horizon, "A");
  return log_risk_from_diag(risk.S(A), A, sol.diagonal());
}

double optimal_risk(const VolterraSolution& sol, const RiskSpec& risk, const Eigen::VectorXd& A) {
  if (risk.mu() == 0.0) throw DomainError("optimal risk is undefined for mu = 0");
  return risk.mu() * std::exp(log_optimal_risk(sol, risk, A));
}

Eigen::VectorXd z_h(const GaussianModel& model, const RiskSpec& risk, const VolterraSolution& sol,
                    const Eigen::VectorXd& Y, const Eigen::VectorXd& h) {
  require_scalar(model, "z_h");
  require_feasible(sol);
  const int T = model.horizon();
  require_length(Y, T, "Y");
  require_length(h, T, "h");
  const Eigen::VectorXd A = model.scalar_gains();
  const double mu = risk.mu();

  // Per-step innovation term  [-mu Q_l (h_l - Z_l) + A_l (Y_l - A_l Z_l)] / (1 + S_l gamma_l).
  Eigen::VectorXd Z(T), innov(T);
  for (int t = 0; t < T; ++t) {
    double acc = model.mean()(t);
    for (int l = 0; l < t; ++l) acc += sol.gamma(t, l) * innov(l);
    Z(t) = acc;
    innov(t) = (-mu * risk.Q()(t) * (h(t) - Z(t)) + A(t) * (Y(t) - A(t) * Z(t))) / (1.0 + sol.S(t) * sol.gamma(t, t));
  }
  return Z;
}

ZTilde z_tilde(const GaussianModel& model, const RiskSpec& risk, const VolterraSolution& sol,
               const Eigen::VectorXd& Y, const Eigen::VectorXd& h) {
  const Eigen::VectorXd Z = z_h(model, risk, sol, Y, h);
  const int T = model.horizon();
  const Eigen::VectorXd A = model.scalar_gains();
  const double mu = risk.mu();

  ZTilde out;
  out.gamma_tilde = tilde_variance(A, sol.diagonal());
  out.Z_tilde.resize(T);
  // Direct recursion in Z~ alone.
  Eigen::VectorXd innov(T);
  for (int t = 0; t < T; ++t) {
    const double gt = sol.gamma(t, t);
    double acc = model.mean()(t) + A(t) * gt * Y(t);
    for (int l = 0; l < t; ++l) acc += sol.gamma(t, l) * innov(l);
    const double zt = acc / (1.0 + A(t) * A(t) * gt);
    out.Z_tilde(t) = zt;
    innov(t) = -mu * risk.Q()(t) / (1.0 + sol.S(t) * gt) * (h(t) - zt) + A(t) * (Y(t) - A(t) * zt);
  }
  for (int t = 0; t < T; ++t) {
    const double gt = sol.gamma(t, t);
    const double from_z = (Z(t) + A(t) * gt * Y(t)) / (1.0 + A(t) * A(t) * gt);
    const double scale = std::max({1.0, std::abs(from_z), std::abs(out.Z_tilde(t))});
    if (std::abs(from_z - out.Z_tilde(t)) > 1e-9 * scale)
      throw InconsistentRecursion("Z~ recursion disagrees with Z^h at t = " + std::to_string(t + 1));
  }
  return out;
}

FilterRun ar1_filter(const Eigen::VectorXd& a, const Eigen::VectorXd& D, double x0, const Eigen::VectorXd& A,
                     const Eigen::VectorXd& Q, double mu, const Eigen::VectorXd& Y) {
  const int T = static_cast<int>(D.size());
  require_length(Y, T, "Y");
  const Eigen::VectorXd g = ar1_riccati(a, D, A, Q, mu);
  const Eigen::VectorXd S = A.array().square() - mu * Q.array();

  FilterRun run;
  run.h_bar.resize(T);
  run.Z_h.resize(T);
  double prev = x0;
  for (int t = 0; t < T; ++t) {
    run.Z_h(t) = a(t) * prev;
    run.h_bar(t) = (run.Z_h(t) + A(t) * g(t) * Y(t)) / (1.0 + A(t) * A(t) * g(t));
    prev = run.h_bar(t);
  }
  run.Z_tilde = run.h_bar;
  run.gamma_bar = g;
  run.gamma_tilde = tilde_variance(A, g);
  run.risk = risk_or_none(mu, S, A, g);
  return run;
}

FilterRun ma1_filter(double lambda, const Eigen::VectorXd& A, const Eigen::VectorXd& Q, double mu,
                     const Eigen::VectorXd& Y) {
  const int T = static_cast<int>(A.size());
  require_length(Y, T, "Y");
  const Eigen::VectorXd g = ma1_gamma(lambda, A, Q, mu);
  const Eigen::VectorXd S = A.array().square() - mu * Q.array();

  FilterRun run;
  run.h_bar.resize(T);
  run.Z_h.resize(T);
  for (int t = 0; t < T; ++t) {
    run.Z_h(t) = t == 0 ? 0.0 : lambda * A(t - 1) * (Y(t - 1) - A(t - 1) * run.h_bar(t - 1));
    run.h_bar(t) = (run.Z_h(t) + A(t) * g(t) * Y(t)) / (1.0 + A(t) * A(t) * g(t));
  }
  run.Z_tilde = run.h_bar;
  run.gamma_bar = g;
  run.gamma_tilde = tilde_variance(A, g);
  run.risk = risk_or_none(mu, S, A, g);
  return run;
}

Eigen::VectorXd risk_neutral_filter(const GaussianModel& model, const Eigen::VectorXd& Y) {
  const RiskSpec neutral(0.0, Eigen::VectorXd::Zero(model.horizon()));
  return leg_filter(model, neutral, Y).h_bar;
}

Prediction risk_neutral_prediction(const GaussianModel& model, const Eigen::VectorXd& Y) {
  const RiskSpec neutral(0.0, Eigen::VectorXd::Zero(model.horizon()));
  const VolterraSolution sol = solve_volterra(model, neutral);
  require_feasible(sol);
  return {z_h(model, neutral, sol, Y, Eigen::VectorXd::Zero(model.horizon())), sol.diagonal()};
}

namespace {

struct StepTerms {
  Eigen::MatrixXd Vy;                   // Y-only innovation covariance
  Eigen::PartialPivLU<Eigen::MatrixXd> Vy_lu;
  detail::AugmentedRows rows;
  Eigen::PartialPivLU<Eigen::MatrixXd> V_lu;  // joint (Y, pseudo-observation) innovation covariance
};

StepTerms step_terms(const GaussianModel& model, const MatrixRiskSpec& risk, const VolterraSolution& sol, int l) {
  const int m = model.obs_dim();
  const Eigen::MatrixXd& A = model.gain(l + 1);
  const Eigen::MatrixXd g = sol.block(l + 1, l + 1);
  const Eigen::MatrixXd K = model.cross_block(l + 1, l + 1);
  StepTerms st;
  st.Vy = Eigen::MatrixXd::Identity(m, m) + A * g * A.transpose() + A * K + K.transpose() * A.transpose();
  st.Vy_lu = st.Vy.partialPivLu();
  st.rows = detail::augmented_rows(A, risk.Q(l + 1), risk.mu());
  const auto& Ab = st.rows.Abar;
  Eigen::MatrixXd kb = Eigen::MatrixXd::Zero(model.state_dim(), Ab.rows());
  kb.leftCols(m) = K;
  Eigen::MatrixXd V = Ab * g * Ab.transpose() + Ab * kb + kb.transpose() * Ab.transpose();
  V.diagonal() += st.rows.noise;
  st.V_lu = V.partialPivLu();
  return st;
}

}  // namespace

VectorFilterRun filter_correlated(const GaussianModel& model, const MatrixRiskSpec& risk, const Eigen::VectorXd& Y) {
  const int T = model.horizon(), n = model.state_dim(), m = model.obs_dim();
  require_length(Y, T * m, "Y");
  VectorFilterRun run;
  run.solution = solve_volterra_correlated(model, risk);
  require_feasible(run.solution);
  const auto& sol = run.solution;

  run.h_bar.resize(T * n);
  run.Z.resize(T * n);
  std::vector<Eigen::VectorXd> weighted(T);  // V_l^{-1} (Y_l - A_l Z_l)
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd z = model.mean_block(t + 1);
    for (int l = 0; l < t; ++l) {
      const Eigen::MatrixXd C = sol.block(t + 1, l + 1) * model.gain(l + 1).transpose() + model.cross_block(t + 1, l + 1);
      z += C * weighted[l];
    }
    run.Z.segment(t * n, n) = z;
    const StepTerms st = step_terms(model, risk, sol, t);
    weighted[t] = st.Vy_lu.solve(Y.segment(t * m, m) - model.gain(t + 1) * z);
    const Eigen::MatrixXd Ct = sol.block(t + 1, t + 1) * model.gain(t + 1).transpose() + model.cross_block(t + 1, t + 1);
    run.h_bar.segment(t * n, n) = z + Ct * weighted[t];
  }
  return run;
}

Eigen::VectorXd vector_z_h(const GaussianModel& model, const MatrixRiskSpec& risk, const VolterraSolution& sol,
                           const Eigen::VectorXd& Y, const Eigen::VectorXd& h) {
  const int T = model.horizon(), n = model.state_dim(), m = model.obs_dim();
  require_length(Y, T * m, "Y");
  require_length(h, T * n, "h");
  require_feasible(sol);

  Eigen::VectorXd Z(T * n);
  std::vector<StepTerms> steps;
  std::vector<Eigen::VectorXd> weighted;
  steps.reserve(T);
  weighted.reserve(T);
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd z = model.mean_block(t + 1);
    for (int l = 0; l < t; ++l) {
      const auto& Ab = steps[l].rows.Abar;
      Eigen::MatrixXd C = sol.block(t + 1, l + 1) * Ab.transpose();
      C.leftCols(m) += model.cross_block(t + 1, l + 1);
      z += C * weighted[l];
    }
    Z.segment(t * n, n) = z;
    steps.push_back(step_terms(model, risk, sol, t));
    const auto& rows = steps.back().rows;
    Eigen::VectorXd nu(rows.Abar.rows());
    nu.head(m) = Y.segment(t * m, m) - model.gain(t + 1) * z;
    nu.tail(nu.size() - m) = rows.Abar.bottomRows(nu.size() - m) * (h.segment(t * n, n) - z);
    weighted.push_back(steps.back().V_lu.solve(nu));
  }
  return Z;
}

}  // namespace rsfilt
