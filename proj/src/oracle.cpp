#include "rsfilt/oracle.hpp"

#include "rsfilt/errors.hpp"
#include "rsfilt/linalg.hpp"
#include "rsfilt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rsfilt {

int JointGaussian::index(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DimensionMismatch("unknown coordinate label " + label);
  return static_cast<int>(it - labels.begin());
}

std::vector<int> JointGaussian::indices(const std::vector<std::string>& names) const {
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(index(n));
  return out;
}

std::string x_label(int t, int component) {
  return "X" + std::to_string(t) + (component >= 0 ? "." + std::to_string(component) : "");
}
std::string y_label(int t, int component) {
  return "Y" + std::to_string(t) + (component >= 0 ? "." + std::to_string(component) : "");
}
std::string y2_label(int t) { return "Y2_" + std::to_string(t); }

JointGaussian assemble_joint(const GaussianModel& model) {
  const int T = model.horizon(), n = model.state_dim(), m = model.obs_dim();
  Eigen::MatrixXd Abig = Eigen::MatrixXd::Zero(T * m, T * n);
  for (int t = 0; t < T; ++t) Abig.block(t * m, t * n, m, n) = model.gain(t + 1);
  const Eigen::MatrixXd& K = model.cov();
  const Eigen::MatrixXd C = model.cross_cov().value_or(Eigen::MatrixXd::Zero(T * n, T * m));

  JointGaussian j;
  j.mean.resize(T * (n + m));
  j.mean.head(T * n) = model.mean();
  j.mean.tail(T * m) = Abig * model.mean();
  j.cov.resize(T * (n + m), T * (n + m));
  j.cov.topLeftCorner(T * n, T * n) = K;
  const Eigen::MatrixXd Kxy = K * Abig.transpose() + C;
  j.cov.topRightCorner(T * n, T * m) = Kxy;
  j.cov.bottomLeftCorner(T * m, T * n) = Kxy.transpose();
  Eigen::MatrixXd Kyy = Abig * K * Abig.transpose() + Abig * C + C.transpose() * Abig.transpose();
  Kyy.diagonal().array() += 1.0;
  j.cov.bottomRightCorner(T * m, T * m) = Kyy;
  linalg::symmetrize(j.cov);
  linalg::require_psd(j.cov, "joint (X, Y) covariance");

  for (int t = 1; t <= T; ++t)
    for (int i = 0; i < n; ++i) j.labels.push_back(x_label(t, n == 1 ? -1 : i));
  for (int t = 1; t <= T; ++t)
    for (int i = 0; i < m; ++i) j.labels.push_back(y_label(t, m == 1 ? -1 : i));
  return j;
}

JointGaussian condition(const JointGaussian& joint, const std::vector<int>& observed, const Eigen::VectorXd& values) {
  if (static_cast<Eigen::Index>(observed.size()) != values.size())
    throw DimensionMismatch("condition: index and value counts differ");
  const int N = joint.size();
  JointGaussian out = joint;
  if (observed.empty()) return out;

  const double scale = std::max(1.0, joint.cov.diagonal().cwiseAbs().maxCoeff());
  std::vector<int> keep;
  std::vector<double> keep_values;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const int i = observed[k];
    if (i < 0 || i >= N) throw DimensionMismatch("condition: index out of range");
    if (joint.cov(i, i) <= 1e-13 * scale) {
      out.dropped.push_back(i);
    } else {
      keep.push_back(i);
      keep_values.push_back(values(static_cast<Eigen::Index>(k)));
    }
  }

  if (!keep.empty()) {
    const int r = static_cast<int>(keep.size());
    Eigen::MatrixXd Soo(r, r), Sxo(N, r);
    Eigen::VectorXd resid(r);
    for (int a = 0; a < r; ++a) {
      resid(a) = keep_values[a] - joint.mean(keep[a]);
      Sxo.col(a) = joint.cov.col(keep[a]);
      for (int b = 0; b < r; ++b) Soo(a, b) = joint.cov(keep[a], keep[b]);
    }
    if (linalg::condition_number(Soo) >= kConditionLimit)
      throw SingularConditioning("observed covariance block is singular");
    const Eigen::LLT<Eigen::MatrixXd> llt(Soo);
    if (llt.info() != Eigen::Success) throw SingularConditioning("observed covariance block is not positive definite");
    out.mean = joint.mean + Sxo * llt.solve(resid);
    out.cov = joint.cov - Sxo * llt.solve(Sxo.transpose());
  }
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const int i = observed[k];
    out.mean(i) = values(static_cast<Eigen::Index>(k));
    out.cov.row(i).setZero();
    out.cov.col(i).setZero();
  }
  linalg::symmetrize(out.cov);
  return out;
}

TiltResult tilt(const JointGaussian& joint, const std::vector<int>& idx, const Eigen::VectorXd& q,
                const Eigen::VectorXd& c) {
  const int k = static_cast<int>(idx.size());
  if (q.size() != k || c.size() != k) throw DimensionMismatch("tilt: weight and center lengths differ");
  const int N = joint.size();
  Eigen::MatrixXd P(k, k), Sxi(N, k);
  Eigen::VectorXd d(k);
  for (int a = 0; a < k; ++a) {
    Sxi.col(a) = joint.cov.col(idx[a]);
    d(a) = c(a) - joint.mean(idx[a]);
    for (int b = 0; b < k; ++b) P(a, b) = joint.cov(idx[a], idx[b]);
  }
  const Eigen::MatrixXd L = linalg::psd_factor(P);
  const Eigen::MatrixXd WL = q.asDiagonal() * L;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(L.cols(), L.cols()) + L.transpose() * WL;
  linalg::symmetrize(M);
  const Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0)
    throw TransformDiverges("exponential-quadratic transform diverges: I + L'WL is not positive definite");
  // B = (I + W P)^{-1} W
  Eigen::MatrixXd B = Eigen::MatrixXd(q.asDiagonal()) - WL * llt.solve(WL.transpose());
  linalg::symmetrize(B);

  TiltResult res;
  res.law = joint;
  res.law.mean = joint.mean + Sxi * (B * d);
  res.law.cov = joint.cov - Sxi * B * Sxi.transpose();
  linalg::symmetrize(res.law.cov);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  res.log_normalizer = -0.5 * logdet - 0.5 * d.dot(B * d);
  return res;
}

double log_conditional_exp_quadratic(const JointGaussian& joint, const Eigen::VectorXd& Y_values,
                                     const RiskSpec& risk, const Eigen::VectorXd& h) {
  const int T = risk.horizon();
  if (Y_values.size() != T || h.size() != T) throw DimensionMismatch("conditional_exp_quadratic: length mismatch");
  std::vector<int> xi, yi;
  for (int t = 1; t <= T; ++t) {
    xi.push_back(joint.index(x_label(t)));
    yi.push_back(joint.index(y_label(t)));
  }
  const JointGaussian post = condition(joint, yi, Y_values);
  return tilt(post, xi, -risk.mu() * risk.Q(), h).log_normalizer;
}

double conditional_exp_quadratic(const JointGaussian& joint, const Eigen::VectorXd& Y_values, const RiskSpec& risk,
                                 const Eigen::VectorXd& h) {
  return std::exp(log_conditional_exp_quadratic(joint, Y_values, risk, h));
}

// ---------------------------------------------------------------------------
// Augmented system

JointGaussian AugmentedSystem::conditional(int y_upto, int y2_upto) const {
  std::vector<int> idx;
  std::vector<double> vals;
  for (int s = 1; s <= y_upto; ++s) {
    idx.push_back(joint.index(y_label(s)));
    vals.push_back(Y(s - 1));
  }
  for (int s = 1; s <= y2_upto; ++s) {
    idx.push_back(joint.index(y2_label(s)));
    vals.push_back(Y2(s - 1));
  }
  return condition(joint, idx, Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
}

namespace {

double xxi_cov(const AugmentedSystem& sys, const JointGaussian& law, int t) {
  const int it = law.index(x_label(t));
  double acc = 0.0;
  for (int s = 1; s < t; ++s) acc += law.cov(it, law.index(x_label(s))) * sys.Y2(s - 1);
  return acc;
}

}  // namespace

double AugmentedSystem::pi_bar_pred(int t) const {
  const JointGaussian law = conditional(t - 1, t - 1);
  return law.mean(law.index(x_label(t)));
}

double AugmentedSystem::gamma_bar(int t) const {
  const JointGaussian law = conditional(t - 1, t - 1);
  const int i = law.index(x_label(t));
  return law.cov(i, i);
}

double AugmentedSystem::gamma_xxi(int t) const { return xxi_cov(*this, conditional(t - 1, t - 1), t); }

double AugmentedSystem::z_h(int t) const {
  const JointGaussian law = conditional(t - 1, t - 1);
  return law.mean(law.index(x_label(t))) - xxi_cov(*this, law, t);
}

double AugmentedSystem::z_tilde(int t) const {
  const JointGaussian law = conditional(t, t - 1);
  return law.mean(law.index(x_label(t))) - xxi_cov(*this, law, t);
}

double AugmentedSystem::gamma_tilde(int t) const {
  const JointGaussian law = conditional(t, t - 1);
  const int i = law.index(x_label(t));
  return law.cov(i, i);
}

AugmentedSystem augmented_system(const GaussianModel& model, const RiskSpec& risk, const Eigen::VectorXd& h,
                                 const Eigen::VectorXd& Y_values, std::uint64_t aux_seed) {
  if (!model.is_scalar()) throw DimensionMismatch("augmented_system requires a scalar model");
  if (risk.mu() > 0.0) throw DomainError("augmented_system requires mu <= 0");
  const int T = model.horizon();
  if (h.size() != T || Y_values.size() != T) throw DimensionMismatch("augmented_system: length mismatch");
  const Eigen::VectorXd q = -risk.mu() * risk.Q();
  const JointGaussian xy = assemble_joint(model);

  AugmentedSystem sys;
  sys.horizon = T;
  sys.h = h;
  sys.Y = Y_values;
  auto& j = sys.joint;
  j.mean.resize(3 * T);
  j.cov = Eigen::MatrixXd::Zero(3 * T, 3 * T);
  j.mean.head(2 * T) = xy.mean;
  j.cov.topLeftCorner(2 * T, 2 * T) = xy.cov;
  j.labels = xy.labels;
  for (int t = 0; t < T; ++t) {
    j.labels.push_back(y2_label(t + 1));
    j.mean(2 * T + t) = q(t) * (xy.mean(t) - h(t));
    for (int k = 0; k < 2 * T; ++k) {
      j.cov(2 * T + t, k) = q(t) * xy.cov(t, k);
      j.cov(k, 2 * T + t) = j.cov(2 * T + t, k);
    }
    for (int s = 0; s < T; ++s) j.cov(2 * T + t, 2 * T + s) = q(t) * q(s) * xy.cov(t, s);
    j.cov(2 * T + t, 2 * T + t) += q(t);
  }
  linalg::symmetrize(j.cov);
  linalg::require_psd(j.cov, "augmented (X, Y, Y2) covariance");

  // Draw Y2 from its conditional law given Y.
  std::vector<int> yi;
  for (int t = 1; t <= T; ++t) yi.push_back(j.index(y_label(t)));
  const JointGaussian given_y = condition(j, yi, Y_values);
  const Eigen::MatrixXd cov2 = given_y.cov.bottomRightCorner(T, T);
  const Eigen::MatrixXd L = linalg::psd_factor(cov2);
  SplitMix64 rng(aux_seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(L.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  sys.Y2 = given_y.mean.tail(T) + L * z;
  return sys;
}

// ---------------------------------------------------------------------------
// Affine risk minimization

namespace {

double log_affine_criterion(const JointGaussian& xy, const RiskSpec& risk, const AffineFilter& filter,
                            const Eigen::VectorXd& state_penalty) {
  const int T = risk.horizon();
  if (filter.horizon() != T) throw DimensionMismatch("affine filter horizon differs from model horizon");
  const bool penalized = state_penalty.size() > 0;
  if (penalized && state_penalty.size() != T) throw DimensionMismatch("state penalty length differs from horizon");

  const int rows = penalized ? 2 * T : T;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, 2 * T);
  D.topLeftCorner(T, T).setIdentity();
  D.topRightCorner(T, T) = -Eigen::MatrixXd(filter.G.triangularView<Eigen::Lower>());
  if (penalized) D.bottomLeftCorner(T, T).setIdentity();
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(rows);
  shift.head(T) = filter.c;

  JointGaussian u;
  u.mean = D * xy.mean - shift;
  u.cov = D * xy.cov * D.transpose();
  linalg::symmetrize(u.cov);
  u.labels.resize(rows);
  Eigen::VectorXd q(rows);
  q.head(T) = -risk.mu() * risk.Q();
  if (penalized) q.tail(T) = -risk.mu() * state_penalty;
  std::vector<int> idx(rows);
  for (int i = 0; i < rows; ++i) idx[i] = i;
  return tilt(u, idx, q, Eigen::VectorXd::Zero(rows)).log_normalizer;
}

}  // namespace

double log_affine_exp_criterion(const GaussianModel& model, const RiskSpec& risk, const AffineFilter& filter,
                                const Eigen::VectorXd& state_penalty) {
  if (!model.is_scalar()) throw DimensionMismatch("affine criterion requires a scalar model");
  if (risk.horizon() != model.horizon()) throw DimensionMismatch("risk weights and model have different horizons");
  return log_affine_criterion(assemble_joint(model), risk, filter, state_penalty);
}

namespace {

struct Packing {
  int T;
  int size() const { return T + T * (T + 1) / 2; }
  Eigen::VectorXd pack(const AffineFilter& f) const {
    Eigen::VectorXd th(size());
    th.head(T) = f.c;
    int k = T;
    for (int t = 0; t < T; ++t)
      for (int l = 0; l <= t; ++l) th(k++) = f.G(t, l);
    return th;
  }
  AffineFilter unpack(const Eigen::VectorXd& th) const {
    AffineFilter f;
    f.c = th.head(T);
    f.G = Eigen::MatrixXd::Zero(T, T);
    int k = T;
    for (int t = 0; t < T; ++t)
      for (int l = 0; l <= t; ++l) f.G(t, l) = th(k++);
    return f;
  }
};

class PatternSearch {
 public:
  PatternSearch(std::function<double(const Eigen::VectorXd&)> f, int max_evals)
      : f_(std::move(f)), max_evals_(max_evals) {}

  std::pair<Eigen::VectorXd, double> run(Eigen::VectorXd x, double step, double tol) {
    double fx = eval(x);
    while (step > tol) {
      auto [y, fy] = explore(x, fx, step);
      if (fy < fx) {
        while (true) {
          Eigen::VectorXd xp = 2.0 * y - x;
          x = y;
          fx = fy;
          const double fxp = eval(xp);
          auto [z, fz] = explore(xp, fxp, step);
          if (fz < fx) {
            y = z;
            fy = fz;
          } else {
            break;
          }
        }
      } else {
        step *= 0.5;
      }
    }
    return {x, fx};
  }

  int evaluations() const noexcept { return evals_; }

 private:
  double eval(const Eigen::VectorXd& x) {
    if (++evals_ > max_evals_) throw NoConvergence("pattern search exceeded " + std::to_string(max_evals_) +
                                                   " evaluations");
    return f_(x);
  }

  std::pair<Eigen::VectorXd, double> explore(Eigen::VectorXd x, double fx, double step) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double orig = x(i);
      x(i) = orig + step;
      double ft = eval(x);
      if (ft < fx) {
        fx = ft;
        continue;
      }
      x(i) = orig - step;
      ft = eval(x);
      if (ft < fx) {
        fx = ft;
        continue;
      }
      x(i) = orig;
    }
    return {x, fx};
  }

  std::function<double(const Eigen::VectorXd&)> f_;
  int max_evals_;
  int evals_ = 0;
};

}  // namespace

AffineRiskResult minimize_affine_risk(const GaussianModel& model, const RiskSpec& risk,
                                      const AffineRiskOptions& options) {
  if (!model.is_scalar()) throw DimensionMismatch("minimize_affine_risk requires a scalar model");
  if (risk.horizon() != model.horizon()) throw DimensionMismatch("risk weights and model have different horizons");
  return minimize_affine_risk(assemble_joint(model), risk, options);
}

JointGaussian marginal(const JointGaussian& joint, const std::vector<int>& idx) {
  JointGaussian out;
  const int k = static_cast<int>(idx.size());
  out.mean.resize(k);
  out.cov.resize(k, k);
  for (int a = 0; a < k; ++a) {
    out.mean(a) = joint.mean(idx[a]);
    out.labels.push_back(joint.labels[idx[a]]);
    for (int b = 0; b < k; ++b) out.cov(a, b) = joint.cov(idx[a], idx[b]);
  }
  return out;
}

AffineFilter conditional_mean_filter(const JointGaussian& joint, int T) {
  std::vector<int> xi, yi;
  for (int t = 1; t <= T; ++t) {
    xi.push_back(joint.index(x_label(t)));
    yi.push_back(joint.index(y_label(t)));
  }
  return extract_affine(
      [&](const Eigen::VectorXd& Y) {
        Eigen::VectorXd h(T);
        for (int t = 1; t <= T; ++t) {
          const JointGaussian post =
              condition(joint, std::vector<int>(yi.begin(), yi.begin() + t), Y.head(t));
          h(t - 1) = post.mean(xi[t - 1]);
        }
        return h;
      },
      T);
}

AffineRiskResult minimize_affine_risk(const JointGaussian& joint, const RiskSpec& risk,
                                      const AffineRiskOptions& options) {
  const int T = risk.horizon();
  std::vector<int> order;
  for (int t = 1; t <= T; ++t) order.push_back(joint.index(x_label(t)));
  for (int t = 1; t <= T; ++t) order.push_back(joint.index(y_label(t)));
  const JointGaussian xy = marginal(joint, order);
  const Packing pk{T};
  const AffineFilter start = conditional_mean_filter(xy, T);
  const Eigen::VectorXd& P = options.state_penalty;

  AffineRiskResult best;
  best.coefficients = start;
  best.log_value = log_affine_criterion(xy, risk, start, P);
  best.risk = risk.mu() * std::exp(best.log_value);
  best.evaluations = 1;
  const bool flat = risk.mu() == 0.0 || ((risk.Q().array() == 0.0).all() && (P.size() == 0 || (P.array() == 0.0).all()));
  if (flat) return best;

  const double sign = risk.mu() < 0.0 ? -1.0 : 1.0;
  auto objective = [&](const Eigen::VectorXd& th) {
    try {
      return sign * log_affine_criterion(xy, risk, pk.unpack(th), P);
    } catch (const TransformDiverges&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  SplitMix64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 0.3);
  const Eigen::VectorXd th0 = pk.pack(start);
  double best_f = sign * best.log_value;
  Eigen::VectorXd best_th = th0;
  int total = 1;
  for (int s = 0; s < std::max(1, options.starts); ++s) {
    Eigen::VectorXd x = th0;
    if (s > 0)
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += normal(rng);
    PatternSearch ps(objective, options.max_evaluations);
    auto [xs, fs] = ps.run(x, 0.25, options.tolerance);
    total += ps.evaluations();
    if (fs < best_f) {
      best_f = fs;
      best_th = xs;
    }
  }
  best.coefficients = pk.unpack(best_th);
  best.log_value = sign * best_f;
  best.risk = risk.mu() * std::exp(best.log_value);
  best.evaluations = total;
  return best;
}

// ---------------------------------------------------------------------------
// Random-walk example

BackwardRiccati backward_riccati(int T) {
  if (T < 1) throw DomainError("backward_riccati requires T >= 1");
  BackwardRiccati br;
  br.horizon = T;
  const double r5 = std::sqrt(5.0);
  br.lambda_const = (3.0 - r5) / (3.0 + r5);
  br.Gamma.resize(T);
  br.Gamma(T - 1) = 0.0;
  for (int t = T - 1; t >= 1; --t) br.Gamma(t - 1) = 1.0 + br.Gamma(t) / (1.0 + br.Gamma(t));
  br.closed_form.resize(T);
  br.printed_form.resize(T);
  const double l = br.lambda_const;
  for (int t = 1; t <= T; ++t) {
    // Written in terms of l^(T-t) to stay finite for large T.
    const double ln = std::pow(l, T - t);
    br.closed_form(t - 1) = 2.0 * (1.0 - ln) / ((r5 - 1.0) + (1.0 + r5) * ln);
    br.printed_form(t - 1) = 10.0 * (ln - 1.0) / ((1.0 - r5) * ln - (1.0 + r5));
  }
  br.max_discrepancy = (br.Gamma - br.closed_form).cwiseAbs().maxCoeff();
  br.printed_discrepancy = (br.Gamma - br.printed_form).cwiseAbs().maxCoeff();
  return br;
}

LegVsRsReport leg_vs_rs_example(int T) {
  if (T < 2) throw DomainError("leg_vs_rs_example requires T >= 2");
  LegVsRsReport rep;
  rep.horizon = T;
  rep.riccati = backward_riccati(T);
  const double G1 = rep.riccati.Gamma(0);
  rep.stated_hbar1 = (1.0 + G1) / (2.0 + G1);
  rep.stated_hhat1 = 0.25;

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(T);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(T);
  e1(0) = 1.0;
  const RiskSpec risk(-1.0, ones);

  rep.stated_a = (1.0 + rep.riccati.Gamma.array()).inverse();
  rep.transformed_model_hbar1 = ar1_filter(rep.stated_a, rep.stated_a, 0.0, ones, ones, -1.0, e1).h_bar(0);

  // Random walk and its law reweighted by exp{-1/2 sum X_t^2}.
  const GaussianModel walk = build_ar1(ones, ones, 0.0, ones);
  const Eigen::MatrixXd& K = walk.cov();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(T, T);
  Eigen::MatrixXd Khat = K - K * (I + K).llt().solve(K);
  linalg::symmetrize(Khat);
  const GaussianModel tilted = build_general(Eigen::VectorXd::Zero(T), Khat, ones);
  rep.oracle_hbar1 = leg_filter(tilted, risk, e1).h_bar(0);

  rep.tilted_a = Eigen::VectorXd::Zero(T);
  rep.tilted_D = Eigen::VectorXd::Zero(T);
  rep.tilted_D(0) = Khat(0, 0);
  for (int t = 1; t < T; ++t) {
    rep.tilted_a(t) = Khat(t, t - 1) / Khat(t - 1, t - 1);
    rep.tilted_D(t) = Khat(t, t) - rep.tilted_a(t) * Khat(t, t - 1);
  }

  if (T <= 3) {
    AffineRiskOptions opt;
    opt.state_penalty = ones;
    rep.brute_force_hbar1 = minimize_affine_risk(walk, risk, opt).coefficients.G(0, 0);
  }

  // One-step problem: minimize E[-exp{-1/2 (X_1^2 + (X_1 - h)^2)} | Y_1 = 1].
  const JointGaussian j = assemble_joint(walk);
  const JointGaussian post = condition(j, {j.index(y_label(1))}, Eigen::VectorXd::Ones(1));
  const int x1 = j.index(x_label(1));
  const double pi1 = post.mean(x1), g1 = post.cov(x1, x1);
  rep.pi1_over_1_plus_gamma1 = pi1 / (1.0 + g1);
  const TiltResult tl = tilt(post, {x1}, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1));
  rep.oracle_hhat1 = tl.law.mean(x1);
  rep.differ = std::abs(rep.oracle_hbar1 - rep.oracle_hhat1) > 1e-9;
  return rep;
}

}  // namespace rsfilt
