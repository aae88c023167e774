#include "rsfilt/sim.hpp"

#include "rsfilt/errors.hpp"
#include "rsfilt/rng.hpp"
#include "rsfilt/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace rsfilt {

namespace {

constexpr double kExponentCap = 700.0;

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Evaluates fn(begin, end) over [0, n) split into contiguous chunks.
template <class Fn>
void parallel_ranges(int n, Fn fn) {
  const int workers = std::min(worker_count(), std::max(1, n / 1000));
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int b = w * chunk, e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back([=] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

// Per-path exponent (mu/2) sum Q (X - h)^2 or the mean-square sum.
std::vector<double> path_exponents(const ExperimentConfig& cfg, const AffineFilter& filter) {
  const GaussianModel& model = cfg.model;
  const PathSampler sampler(model);
  const Eigen::VectorXd& Q = cfg.risk.Q();
  std::vector<double> out(static_cast<std::size_t>(cfg.n_paths));
  parallel_ranges(cfg.n_paths, [&](int b, int e) {
    Eigen::VectorXd X, Y;
    for (int i = b; i < e; ++i) {
      sampler.draw(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)), X, Y);
      const Eigen::VectorXd err = X - filter.apply(Y);
      const double wss = (Q.array() * err.array().square()).sum();
      out[static_cast<std::size_t>(i)] = cfg.criterion == Criterion::exponential ? 0.5 * cfg.risk.mu() * wss : wss;
    }
  });
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_paths < 1) throw ConfigError("n_paths must be at least 1");
  if (!cfg.model.is_scalar()) throw DimensionMismatch("risk estimation requires a scalar model");
  if (cfg.risk.horizon() != cfg.model.horizon()) throw DimensionMismatch("risk weights and model horizons differ");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be at least 1");
}

RiskEstimate summarize(const ExperimentConfig& cfg, const std::vector<double>& expo) {
  RiskEstimate est;
  est.n_paths = cfg.n_paths;
  est.criterion = cfg.criterion;
  const int n = cfg.n_paths;
  const double mu = cfg.risk.mu();

  // Values are v_i = scale * exp(expo_i - shift) (exponential) or expo_i (mean square).
  double shift = 0.0, scale = 1.0;
  bool exponential = cfg.criterion == Criterion::exponential;
  if (exponential) {
    for (double e : expo)
      if (e > kExponentCap) ++est.overflow_paths;
    if (est.overflow_paths > n / 1000)
      throw OverflowDominated(std::to_string(est.overflow_paths) + " of " + std::to_string(n) +
                              " paths exceed the exponent cap");
    const double emax = *std::max_element(expo.begin(), expo.end());
    shift = emax > kExponentCap ? emax : 0.0;
    scale = mu;
  }
  auto value = [&](double e) { return exponential ? scale * std::exp(e - shift) : e; };

  Kahan total, total_sq;
  for (int b = 0; b < n; b += cfg.batch_size) {
    const int e = std::min(n, b + cfg.batch_size);
    Kahan s, s2;
    for (int i = b; i < e; ++i) {
      const double v = value(expo[static_cast<std::size_t>(i)]);
      s.add(v);
      s2.add(v * v);
    }
    est.batches.push_back({b, e - b, s.sum, s2.sum});
    total.add(s.sum);
    total_sq.add(s2.sum);
  }
  const double mean = total.sum / n;
  Kahan dev;
  for (double e : expo) {
    const double d = value(e) - mean;
    dev.add(d * d);
  }
  const double var = n > 1 ? dev.sum / (n - 1) : 0.0;
  const double se = std::sqrt(var / n);
  est.mean = mean * std::exp(shift);
  est.std_error = se * std::exp(shift);
  est.log_abs_mean = std::log(std::abs(mean)) + shift;
  return est;
}

}  // namespace

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("RSFILT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

std::string to_string(Criterion c) { return c == Criterion::exponential ? "exponential" : "mean_square"; }

AffineFilter resolve_filter(const GaussianModel& model, const RiskSpec& risk, const FilterChoice& choice) {
  const int T = model.horizon();
  switch (choice.kind) {
    case FilterKind::custom:
      if (!choice.custom) throw ConfigError("custom filter requires affine coefficients");
      if (choice.custom->horizon() != T || choice.custom->G.rows() != T || choice.custom->G.cols() != T)
        throw ConfigError("custom filter coefficients do not match the horizon");
      return *choice.custom;
    case FilterKind::risk_neutral:
      return extract_affine([&](const Eigen::VectorXd& Y) { return risk_neutral_filter(model, Y); }, T);
    case FilterKind::leg: {
      const VolterraSolution sol = solve_volterra(model, risk);
      require_feasible(sol);
      return extract_affine([&](const Eigen::VectorXd& Y) { return leg_filter(model, risk, sol, Y).h_bar; }, T);
    }
  }
  throw ConfigError("unknown filter kind");
}

std::vector<double> path_values(const ExperimentConfig& config, const AffineFilter& filter) {
  validate(config);
  std::vector<double> v = path_exponents(config, filter);
  if (config.criterion == Criterion::exponential)
    for (double& x : v) x = config.risk.mu() * std::exp(x);
  return v;
}

RiskEstimate estimate_risk(const ExperimentConfig& config) {
  validate(config);
  const AffineFilter filter = resolve_filter(config.model, config.risk, config.filter);
  return summarize(config, path_exponents(config, filter));
}

ComparisonReport compare_filters(const ExperimentConfig& first, const ExperimentConfig& second) {
  validate(first);
  validate(second);
  if (first.seed != second.seed || first.n_paths != second.n_paths || first.criterion != second.criterion)
    throw ConfigError("paired comparison requires equal seed, path count and criterion");
  if (first.model.cov() != second.model.cov() || first.model.mean() != second.model.mean() ||
      first.model.scalar_gains() != second.model.scalar_gains())
    throw ConfigError("paired comparison requires the same model");
  if (first.risk.mu() != second.risk.mu() || first.risk.Q() != second.risk.Q())
    throw ConfigError("paired comparison requires the same risk specification");

  const AffineFilter fa = resolve_filter(first.model, first.risk, first.filter);
  const AffineFilter fb = resolve_filter(second.model, second.risk, second.filter);
  const std::vector<double> ea = path_exponents(first, fa), eb = path_exponents(second, fb);

  ComparisonReport rep;
  rep.first = summarize(first, ea);
  rep.second = summarize(second, eb);
  rep.n_paths = first.n_paths;
  const int n = first.n_paths;
  const bool expo = first.criterion == Criterion::exponential;
  const double mu = first.risk.mu();
  std::vector<double> diff(static_cast<std::size_t>(n));
  Kahan s;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    diff[k] = expo ? mu * (std::exp(ea[k]) - std::exp(eb[k])) : ea[k] - eb[k];
    s.add(diff[k]);
  }
  rep.mean_difference = s.sum / n;
  Kahan dev;
  for (double d : diff) dev.add((d - rep.mean_difference) * (d - rep.mean_difference));
  rep.difference_std_error = n > 1 ? std::sqrt(dev.sum / (n - 1) / n) : 0.0;
  return rep;
}

}  // namespace rsfilt
