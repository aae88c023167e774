#include "rsfilt/cli.hpp"

#include "rsfilt/cameron_martin.hpp"
#include "rsfilt/errors.hpp"
#include "rsfilt/filter.hpp"
#include "rsfilt/io.hpp"
#include "rsfilt/oracle.hpp"
#include "rsfilt/sim.hpp"
#include "rsfilt/volterra.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace rsfilt::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct Options {
  std::string config;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<double> mu;
  bool quiet = false;
  int T = 10;
};

class Context {
 public:
  Context(const Options& o, std::ostream& out, std::ostream& err) : opt_(o), out_(out), err_(err) {}

  ProblemConfig load() const {
    if (opt_.config.empty()) throw ConfigError("--config is required for this command");
    ProblemConfig cfg = load_config(opt_.config);
    if (opt_.mu) cfg.mu = *opt_.mu;
    if (opt_.paths) {
      if (*opt_.paths < 1) throw ConfigError("--paths must be at least 1");
      cfg.n_paths = *opt_.paths;
    }
    if (opt_.seed) {
      cfg.seed = *opt_.seed;
      cfg.seed_given = true;
    }
    if (!cfg.seed_given) {
      cfg.seed = kDefaultSeed;
      info("seed not given; using default seed " + std::to_string(kDefaultSeed));
    }
    return cfg;
  }

  Eigen::VectorXd observations(const ProblemConfig& cfg) const {
    if (cfg.Y) return *cfg.Y;
    info("Y not given; sampling one path with seed " + std::to_string(cfg.seed));
    return sample(cfg.model, cfg.seed, 1).front().Y;
  }

  void emit(const nlohmann::json& j, const std::string& csv) const {
    if (!all_finite(j)) throw DomainError("non-finite value in output");
    write(opt_.format == "csv" ? csv : j.dump(2) + "\n");
  }

  void info(const std::string& msg) const {
    if (!opt_.quiet) err_ << msg << '\n';
  }

  const Options& options() const { return opt_; }

 private:
  void write(const std::string& text) const {
    if (opt_.out.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(opt_.out);
    if (!f) throw ConfigError("cannot open output file " + opt_.out);
    f << text;
  }

  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
};

void cmd_validate(const Context& ctx) {
  const ProblemConfig cfg = ctx.load();
  const nlohmann::json j = describe(cfg);
  ctx.emit(j, j.dump(2) + "\n");
}

void cmd_filter(const Context& ctx) {
  const ProblemConfig cfg = ctx.load();
  const Eigen::VectorXd Y = ctx.observations(cfg);
  if (cfg.model.is_scalar()) {
    const RiskSpec risk = cfg.scalar_risk();
    const VolterraSolution sol = solve_volterra(cfg.model, risk);
    require_feasible(sol);
    const FilterRun run = leg_filter(cfg.model, risk, sol, Y);
    nlohmann::json j = to_json(run, Y);
    j["affine"] = to_json(
        extract_affine([&](const Eigen::VectorXd& y) { return leg_filter(cfg.model, risk, sol, y).h_bar; },
                       cfg.model.horizon()));
    ctx.emit(j, to_csv(run, Y));
    return;
  }
  const VectorFilterRun run = filter_correlated(cfg.model, cfg.matrix_risk(), Y);
  const int n = cfg.model.state_dim();
  nlohmann::json j;
  j["Y"] = std::vector<double>(Y.data(), Y.data() + Y.size());
  j["h_bar"] = std::vector<double>(run.h_bar.data(), run.h_bar.data() + run.h_bar.size());
  j["Z_h"] = std::vector<double>(run.Z.data(), run.Z.data() + run.Z.size());
  j["state_dim"] = n;
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < n; ++i) csv << ",h_bar." << i;
  for (int i = 0; i < n; ++i) csv << ",Z_h." << i;
  csv << '\n' << std::setprecision(17);
  for (int t = 0; t < cfg.model.horizon(); ++t) {
    csv << t + 1;
    for (int i = 0; i < n; ++i) csv << ',' << run.h_bar(t * n + i);
    for (int i = 0; i < n; ++i) csv << ',' << run.Z(t * n + i);
    csv << '\n';
  }
  ctx.emit(j, csv.str());
}

void cmd_risk(const Context& ctx) {
  const ProblemConfig cfg = ctx.load();
  if (!cfg.model.is_scalar()) {
    const VolterraSolution sol = cfg.model.has_cross_cov()
                                     ? solve_volterra_correlated(cfg.model, cfg.matrix_risk())
                                     : solve_volterra_matrix(cfg.model, cfg.matrix_risk());
    require_feasible(sol);
    ctx.emit(to_json(sol), to_csv(sol));
    return;
  }
  const RiskSpec risk = cfg.scalar_risk();
  const VolterraSolution sol = solve_volterra(cfg.model, risk);
  require_feasible(sol);
  const Eigen::VectorXd A = cfg.model.scalar_gains();
  nlohmann::json j;
  j["mu"] = risk.mu();
  j["feasible"] = true;
  j["sufficient_condition"] = sufficient_condition(cfg.model, risk);
  j["log_abs_risk"] = log_optimal_risk(sol, risk, A);
  if (risk.mu() != 0.0) j["risk"] = optimal_risk(sol, risk, A);
  j["gamma_bar"] = std::vector<double>(sol.gamma.diagonal().data(), sol.gamma.diagonal().data() + sol.horizon);
  j["volterra"] = to_json(sol);
  ctx.emit(j, to_csv(sol));
}

void cmd_cm(const Context& ctx) {
  const ProblemConfig cfg = ctx.load();
  const RiskSpec risk = cfg.scalar_risk();
  const Eigen::VectorXd Y = ctx.observations(cfg);
  const Eigen::VectorXd h = cfg.h ? *cfg.h : leg_filter(cfg.model, risk, Y).h_bar;
  const CMDecomposition cm = cm_decompose(cfg.model, risk, Y, h);
  nlohmann::json j = to_json(cm, Y);
  j["h"] = std::vector<double>(h.data(), h.data() + h.size());
  ctx.emit(j, to_csv(cm, Y));
}

void cmd_simulate(const Context& ctx) {
  const ProblemConfig cfg = ctx.load();
  const RiskEstimate est = estimate_risk(cfg.experiment(cfg.filter));
  nlohmann::json j = to_json(est);
  j["seed"] = cfg.seed;
  ctx.emit(j, batches_csv(est));
}

void cmd_compare(const Context& ctx) {
  const ProblemConfig cfg = ctx.load();
  std::vector<FilterChoice> fs = cfg.filters;
  if (fs.empty()) fs = {FilterChoice{FilterKind::leg, std::nullopt}, FilterChoice{FilterKind::risk_neutral, std::nullopt}};
  const ComparisonReport rep = compare_filters(cfg.experiment(fs[0]), cfg.experiment(fs[1]));
  nlohmann::json j = to_json(rep);
  j["seed"] = cfg.seed;
  std::ostringstream csv;
  csv << std::setprecision(17) << "first_mean,first_std_error,second_mean,second_std_error,mean_difference,"
      << "difference_std_error,n_paths\n"
      << rep.first.mean << ',' << rep.first.std_error << ',' << rep.second.mean << ',' << rep.second.std_error
      << ',' << rep.mean_difference << ',' << rep.difference_std_error << ',' << rep.n_paths << '\n';
  ctx.emit(j, csv.str());
}

void cmd_example(const Context& ctx) {
  if (ctx.options().T < 2) throw ConfigError("--T must be at least 2");
  const nlohmann::json j = to_json(leg_vs_rs_example(ctx.options().T));
  ctx.emit(j, j.dump(2) + "\n");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Risk-sensitive (LEG) filtering for Gaussian signals", "rsfilt"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "Output file (default: stdout)");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", opt.seed, "Random seed override");
  app.add_option("--paths", opt.paths, "Monte Carlo path count override");
  app.add_option("--mu", opt.mu, "Risk parameter override");
  app.add_flag("--quiet", opt.quiet, "Suppress informational messages");

  struct Verb {
    const char* name;
    const char* help;
    void (*fn)(const Context&);
  };
  const Verb verbs[] = {
      {"validate", "Parse a config and echo the resolved parameters", cmd_validate},
      {"filter", "Run the optimal filter on the observations", cmd_filter},
      {"risk", "Solve the covariance recursion and report the optimal risk", cmd_risk},
      {"cm", "Cameron-Martin factorization of the conditional Laplace transform", cmd_cm},
      {"simulate", "Monte Carlo estimate of the criterion for a filter", cmd_simulate},
      {"compare", "Paired Monte Carlo comparison of two filters", cmd_compare},
      {"example-5-2", "Random-walk example with a state penalty", cmd_example},
  };
  std::vector<std::pair<CLI::App*, void (*)(const Context&)>> subs;
  for (const auto& v : verbs) {
    CLI::App* sub = app.add_subcommand(v.name, v.help);
    if (std::string(v.name) == "example-5-2") sub->add_option("--T", opt.T, "Horizon (>= 2)");
    subs.emplace_back(sub, v.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  const Context ctx(opt, out, err);
  try {
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) fn(ctx);
    return kOk;
  } catch (const InfeasibleCondition& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace rsfilt::cli
