#include "rsfilt/cameron_martin.hpp"

#include "rsfilt/errors.hpp"
#include "rsfilt/filter.hpp"
#include "rsfilt/rng.hpp"
#include "rsfilt/volterra.hpp"

#include <cmath>
#include <numbers>

namespace rsfilt {

namespace {

CMDecomposition decompose(const GaussianModel& model, const RiskSpec& risk, const VolterraSolution& sol,
                          const VolterraSolution& sol0, const Eigen::VectorXd& Y, const Eigen::VectorXd& h) {
  const int T = model.horizon();
  const Eigen::VectorXd A = model.scalar_gains();
  const RiskSpec neutral(0.0, Eigen::VectorXd::Zero(T));

  CMDecomposition cm;
  cm.pred = z_h(model, neutral, sol0, Y, Eigen::VectorXd::Zero(T));
  cm.gamma = sol0.diagonal();
  cm.gamma_bar = sol.diagonal();
  cm.Z_h = z_h(model, risk, sol, Y, h);
  const ZTilde zt = z_tilde(model, risk, sol, Y, h);
  cm.Z_tilde = zt.Z_tilde;
  cm.gamma_tilde = zt.gamma_tilde;
  cm.nu = Y - A.cwiseProduct(cm.pred);

  cm.log_factor.resize(T);
  cm.exponent.resize(T);
  cm.log_M.resize(T);
  cm.log_I.resize(T);
  double sum_steps = 0.0, log_m = 0.0;
  for (int t = 0; t < T; ++t) {
    const double gb = cm.gamma_bar(t), a2 = A(t) * A(t), S = sol.S(t);
    cm.log_factor(t) = -0.5 * (std::log1p(S * gb) - std::log1p(a2 * gb));
    const double d = h(t) - cm.Z_tilde(t);
    cm.exponent(t) = 0.5 * risk.mu() * risk.Q()(t) * (1.0 + a2 * gb) / (1.0 + S * gb) * d * d;
    sum_steps += cm.log_factor(t) + cm.exponent(t);
    log_m += log_martingale_increment(A(t), cm.nu(t), cm.Z_h(t), cm.pred(t), cm.gamma(t), gb);
    cm.log_M(t) = log_m;
    cm.log_I(t) = sum_steps + log_m;
  }
  return cm;
}

void require_scalar(const GaussianModel& model) {
  if (!model.is_scalar()) throw DimensionMismatch("Cameron-Martin factorization requires a scalar model");
}

}  // namespace

double log_martingale_increment(double A, double nu, double Z, double pred, double gamma, double gamma_bar) {
  const double a2 = A * A;
  const double db = 1.0 + a2 * gamma_bar, d0 = 1.0 + a2 * gamma;
  const double e = Z - pred;
  return 0.5 * (std::log(d0) - std::log(db)) + A * e * nu / db - 0.5 * a2 * e * e / db -
         0.5 * a2 * (gamma - gamma_bar) * nu * nu / (db * d0);
}

CMDecomposition cm_decompose(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& Y,
                             const Eigen::VectorXd& h) {
  require_scalar(model);
  const VolterraSolution sol = solve_volterra(model, risk);
  require_feasible(sol);
  const VolterraSolution sol0 = solve_volterra(model, RiskSpec(0.0, Eigen::VectorXd::Zero(model.horizon())));
  return decompose(model, risk, sol, sol0, Y, h);
}

MartingaleCheck martingale_expectation_check(const GaussianModel& model, const RiskSpec& risk, int n_paths,
                                             std::uint64_t seed) {
  require_scalar(model);
  if (n_paths < 1) throw DomainError("martingale_expectation_check requires n_paths >= 1");
  const VolterraSolution sol = solve_volterra(model, risk);
  require_feasible(sol);
  const VolterraSolution sol0 = solve_volterra(model, RiskSpec(0.0, Eigen::VectorXd::Zero(model.horizon())));
  const PathSampler sampler(model);
  Eigen::VectorXd X, Y;
  double sum = 0.0, comp = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_paths; ++i) {
    sampler.draw(derive_seed(seed, static_cast<std::uint64_t>(i)), X, Y);
    const Eigen::VectorXd h = leg_filter(model, risk, sol, Y).h_bar;
    const double m = std::exp(decompose(model, risk, sol, sol0, Y, h).log_M(model.horizon() - 1));
    const double y = m - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    sum2 += m * m;
  }
  const double mean = sum / n_paths;
  const double var = n_paths > 1 ? std::max(0.0, (sum2 - n_paths * mean * mean) / (n_paths - 1)) : 0.0;
  return {mean, std::sqrt(var / n_paths), n_paths};
}

double InfoStateDensity::operator()(double x) const {
  const double d = x - center;
  return std::exp(log_weight - 0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

InfoStateDensity info_state(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& Y,
                            const Eigen::VectorXd& h, int t) {
  if (t < 1 || t > model.horizon()) throw DomainError("info_state: t out of range");
  const CMDecomposition cm = cm_decompose(model, risk, Y, h);
  InfoStateDensity out;
  out.center = cm.Z_tilde(t - 1);
  out.variance = cm.gamma_tilde(t - 1);
  double lw = cm.log_M(t - 1);
  for (int r = 0; r < t - 1; ++r) lw += cm.log_factor(r) + cm.exponent(r);
  out.log_weight = lw;
  return out;
}

CMDecomposition cm_general(const JointGaussian& joint, const RiskSpec& risk, const Eigen::VectorXd& Y,
                           const Eigen::VectorXd& h) {
  const int T = risk.horizon();
  if (Y.size() != T || h.size() != T) throw DimensionMismatch("cm_general: length mismatch");
  const Eigen::VectorXd q = -risk.mu() * risk.Q();

  CMDecomposition cm;
  for (auto* v : {&cm.log_I, &cm.log_M, &cm.nu, &cm.pred, &cm.gamma, &cm.gamma_bar, &cm.Z_h, &cm.Z_tilde,
                  &cm.gamma_tilde, &cm.log_factor, &cm.exponent})
    v->resize(T);

  double sum_steps = 0.0, log_m = 0.0;
  for (int t = 1; t <= T; ++t) {
    std::vector<int> past_y, past_x;
    for (int s = 1; s < t; ++s) {
      past_y.push_back(joint.index(y_label(s)));
      past_x.push_back(joint.index(x_label(s)));
    }
    const int xt = joint.index(x_label(t)), yt = joint.index(y_label(t));
    const JointGaussian law = condition(joint, past_y, Y.head(t - 1));
    const JointGaussian tilted =
        past_x.empty() ? law : tilt(law, past_x, q.head(t - 1), h.head(t - 1)).law;

    const double sig2 = law.cov(yt, yt), sig2_bar = tilted.cov(yt, yt);
    if (sig2 <= 1e-14 || sig2_bar <= 1e-14)
      throw SingularConditioning("innovation variance vanishes at t = " + std::to_string(t));
    const double piY = law.mean(yt), Vbar = tilted.mean(yt);

    cm.pred(t - 1) = law.mean(xt);
    cm.gamma(t - 1) = law.cov(xt, xt);
    cm.gamma_bar(t - 1) = tilted.cov(xt, xt);
    cm.Z_h(t - 1) = tilted.mean(xt);
    cm.nu(t - 1) = Y(t - 1) - piY;

    const JointGaussian now = condition(tilted, {yt}, Y.segment(t - 1, 1));
    const double zt = now.mean(xt), gt = now.cov(xt, xt);
    cm.Z_tilde(t - 1) = zt;
    cm.gamma_tilde(t - 1) = gt;

    const double qt = q(t - 1);
    if (1.0 + qt * gt <= 0.0) throw TransformDiverges("tilted variance makes the step factor diverge at t = " +
                                                      std::to_string(t));
    const double d = h(t - 1) - zt;
    cm.log_factor(t - 1) = -0.5 * std::log1p(qt * gt);
    cm.exponent(t - 1) = -0.5 * qt / (1.0 + qt * gt) * d * d;
    const double ey = Y(t - 1) - piY, eb = Y(t - 1) - Vbar;
    log_m += 0.5 * (std::log(sig2) - std::log(sig2_bar)) + ey * ey / (2.0 * sig2) - eb * eb / (2.0 * sig2_bar);
    sum_steps += cm.log_factor(t - 1) + cm.exponent(t - 1);
    cm.log_M(t - 1) = log_m;
    cm.log_I(t - 1) = sum_steps + log_m;
  }
  return cm;
}

double gaussian_pair_exp(double mU, double mV, double gU, double gV, double gUV, double D, double l1, double l2) {
  const double den = 1.0 + D * gU;
  if (!(den > 0.0)) throw DomainError("gaussian_pair_exp: 1 + D gU must be positive");
  const double shifted = mU - l2 * gUV;
  const double e = -l2 * mV + 0.5 * l2 * l2 * gV - 0.5 * D / den * shifted * shifted +
                   (l1 * l1 * gU + 2.0 * l1 * shifted) / (2.0 * den);
  return std::exp(e) / std::sqrt(den);
}

}  // namespace rsfilt
