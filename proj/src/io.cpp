#include "rsfilt/io.hpp"

#include "rsfilt/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rsfilt {

using nlohmann::json;

namespace {

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(join(where, key) + ": required field is missing");
  return obj.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": value is not finite");
  return v;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj.at(key), join(where, key)) : fallback;
}

Eigen::VectorXd vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ConfigError(where + "[0]: expected an array");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    const Eigen::VectorXd row = vector(j[r], rw);
    if (static_cast<std::size_t>(row.size()) != cols) throw ConfigError(rw + ": rows have different lengths");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

// A number broadcast to length T, or an array of length T.
Eigen::VectorXd sequence(const json& j, int T, const std::string& where) {
  if (j.is_number()) return Eigen::VectorXd::Constant(T, number(j, where));
  const Eigen::VectorXd v = vector(j, where);
  if (v.size() != T)
    throw ConfigError(where + ": expected length " + std::to_string(T) + ", got " + std::to_string(v.size()));
  return v;
}

int horizon_of(const json& m, const std::vector<std::string>& seq_keys, const std::string& where) {
  if (m.contains("T")) {
    const json& t = m.at("T");
    if (!t.is_number_integer() || t.get<long long>() < 1) throw ConfigError(join(where, "T") + ": expected a positive integer");
    return static_cast<int>(t.get<long long>());
  }
  for (const auto& k : seq_keys)
    if (m.contains(k) && m.at(k).is_array()) return static_cast<int>(m.at(k).size());
  throw ConfigError(join(where, "T") + ": horizon is missing and cannot be inferred");
}

GaussianModel parse_model(const json& m, std::string& kind) {
  const std::string w = "model";
  if (!m.is_object()) throw ConfigError("model: expected an object");
  const json& k = field(m, "kind", w);
  if (!k.is_string()) throw ConfigError("model.kind: expected a string");
  kind = k.get<std::string>();
  try {
    if (kind == "general") {
      const Eigen::MatrixXd K = matrix(field(m, "K", w), "model.K");
      const int T = static_cast<int>(K.rows());
      const Eigen::VectorXd mean = m.contains("m") ? sequence(m.at("m"), T, "model.m") : Eigen::VectorXd::Zero(T);
      return build_general(mean, K, sequence(field(m, "A", w), T, "model.A"));
    }
    if (kind == "ar1") {
      const int T = horizon_of(m, {"a", "D", "A"}, w);
      return build_ar1(sequence(field(m, "a", w), T, "model.a"), sequence(field(m, "D", w), T, "model.D"),
                       number_or(m, "x0", 0.0, w), sequence(field(m, "A", w), T, "model.A"));
    }
    if (kind == "ma1") {
      const int T = horizon_of(m, {"A"}, w);
      return build_ma1(number(field(m, "lambda", w), "model.lambda"), sequence(field(m, "A", w), T, "model.A"));
    }
    if (kind == "vector") {
      const Eigen::VectorXd mean = vector(field(m, "mean", w), "model.mean");
      const Eigen::MatrixXd K = matrix(field(m, "K", w), "model.K");
      const json& g = field(m, "gains", w);
      if (!g.is_array() || g.empty()) throw ConfigError("model.gains: expected an array of matrices");
      std::vector<Eigen::MatrixXd> gains;
      for (std::size_t i = 0; i < g.size(); ++i) gains.push_back(matrix(g[i], "model.gains[" + std::to_string(i) + "]"));
      std::optional<Eigen::MatrixXd> cross;
      if (m.contains("cross_cov")) cross = matrix(m.at("cross_cov"), "model.cross_cov");
      return build_vector_model(mean, K, gains, cross);
    }
    if (kind == "ma1_obs") {
      const int T = horizon_of(m, {"alpha"}, w);
      return build_ma1_observation_preset(number(field(m, "lambda", w), "model.lambda"),
                                          sequence(field(m, "alpha", w), T, "model.alpha"),
                                          number(field(m, "beta", w), "model.beta"));
    }
    if (kind == "ar1_noise") {
      const int T = horizon_of(m, {"a", "alpha"}, w);
      const double b = number(field(m, "b", w), "model.b");
      return build_ar1_noise_preset(sequence(field(m, "a", w), T, "model.a"), b,
                                    sequence(field(m, "alpha", w), T, "model.alpha"), number_or(m, "beta", b, w));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  throw ConfigError("model.kind: unknown kind '" + kind +
                    "' (expected general, ar1, ma1, vector, ma1_obs or ar1_noise)");
}

std::vector<Eigen::MatrixXd> parse_Q(const json& r, int T, int n) {
  std::vector<Eigen::MatrixXd> Q;
  if (!r.contains("Q")) {
    for (int t = 0; t < T; ++t) Q.push_back(Eigen::MatrixXd::Identity(n, n));
    return Q;
  }
  const json& q = r.at("Q");
  if (q.is_number()) {
    const double v = number(q, "risk.Q");
    for (int t = 0; t < T; ++t) Q.push_back(v * Eigen::MatrixXd::Identity(n, n));
  } else if (q.is_array() && !q.empty() && q[0].is_array()) {
    if (static_cast<int>(q.size()) != T) throw ConfigError("risk.Q: expected " + std::to_string(T) + " matrices");
    for (std::size_t t = 0; t < q.size(); ++t) {
      const Eigen::MatrixXd m = matrix(q[t], "risk.Q[" + std::to_string(t) + "]");
      if (m.rows() != n || m.cols() != n) throw ConfigError("risk.Q[" + std::to_string(t) + "]: wrong dimensions");
      Q.push_back(m);
    }
  } else {
    const Eigen::VectorXd v = sequence(q, T, "risk.Q");
    for (int t = 0; t < T; ++t) Q.push_back(v(t) * Eigen::MatrixXd::Identity(n, n));
  }
  return Q;
}

}  // namespace

RiskSpec ProblemConfig::scalar_risk() const {
  if (model.state_dim() != 1) throw ConfigError("risk: scalar weights require a scalar model");
  Eigen::VectorXd q(static_cast<Eigen::Index>(Q.size()));
  for (std::size_t t = 0; t < Q.size(); ++t) q(static_cast<Eigen::Index>(t)) = Q[t](0, 0);
  return RiskSpec(mu, q);
}

MatrixRiskSpec ProblemConfig::matrix_risk() const { return MatrixRiskSpec(mu, Q); }

ExperimentConfig ProblemConfig::experiment(const FilterChoice& choice) const {
  return ExperimentConfig{model, scalar_risk(), choice, n_paths, seed, criterion, batch_size};
}

FilterChoice filter_from_json(const json& j, const std::string& where) {
  FilterChoice c;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "leg") c.kind = FilterKind::leg;
    else if (s == "risk_neutral") c.kind = FilterKind::risk_neutral;
    else throw ConfigError(where + ": unknown filter '" + s + "' (expected leg, risk_neutral or an affine object)");
    return c;
  }
  if (j.is_object() && j.contains("affine")) {
    c.kind = FilterKind::custom;
    c.custom = affine_from_json(j.at("affine"), join(where, "affine"));
    return c;
  }
  throw ConfigError(where + ": expected \"leg\", \"risk_neutral\" or an object with an \"affine\" field");
}

ProblemConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  std::string kind;
  GaussianModel model = parse_model(field(doc, "model", ""), kind);
  const int T = model.horizon();
  const json& r = field(doc, "risk", "");
  if (!r.is_object()) throw ConfigError("risk: expected an object");
  const double mu = number(field(r, "mu", "risk"), "risk.mu");
  std::vector<Eigen::MatrixXd> Q = parse_Q(r, T, model.state_dim());

  ProblemConfig cfg{kind, std::move(model), mu, std::move(Q), std::nullopt, std::nullopt, {}, {}};
  try {
    cfg.matrix_risk();
  } catch (const Error& e) {
    throw ConfigError(std::string("risk: ") + e.what());
  }
  const int obs_len = T * cfg.model.obs_dim();
  if (doc.contains("Y")) cfg.Y = sequence(doc.at("Y"), obs_len, "Y");
  if (doc.contains("h")) cfg.h = sequence(doc.at("h"), T * cfg.model.state_dim(), "h");
  if (doc.contains("filter")) cfg.filter = filter_from_json(doc.at("filter"), "filter");
  if (doc.contains("filters")) {
    const json& fs = doc.at("filters");
    if (!fs.is_array() || fs.size() != 2) throw ConfigError("filters: expected an array of two filters");
    for (std::size_t i = 0; i < 2; ++i) cfg.filters.push_back(filter_from_json(fs[i], "filters[" + std::to_string(i) + "]"));
  }
  if (doc.contains("n_paths")) {
    const json& n = doc.at("n_paths");
    if (!n.is_number_integer() || n.get<long long>() < 1 || n.get<long long>() > 100000000)
      throw ConfigError("n_paths: expected an integer in [1, 1e8]");
    cfg.n_paths = static_cast<int>(n.get<long long>());
  }
  if (doc.contains("batch_size")) {
    const json& n = doc.at("batch_size");
    if (!n.is_number_integer() || n.get<long long>() < 1) throw ConfigError("batch_size: expected a positive integer");
    cfg.batch_size = static_cast<int>(n.get<long long>());
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
    cfg.seed_given = true;
  }
  if (doc.contains("criterion")) {
    const json& c = doc.at("criterion");
    if (c == "exponential") cfg.criterion = Criterion::exponential;
    else if (c == "mean_square") cfg.criterion = Criterion::mean_square;
    else throw ConfigError("criterion: expected \"exponential\" or \"mean_square\"");
  }
  if (cfg.filter.kind == FilterKind::custom && cfg.filter.custom->horizon() != T)
    throw ConfigError("filter.affine: horizon differs from the model horizon");
  for (std::size_t i = 0; i < cfg.filters.size(); ++i)
    if (cfg.filters[i].kind == FilterKind::custom && cfg.filters[i].custom->horizon() != T)
      throw ConfigError("filters[" + std::to_string(i) + "].affine: horizon differs from the model horizon");
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ": invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  return parse_config(doc);
}

namespace {

json vec_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

json describe(const ProblemConfig& cfg) {
  json j;
  j["model"] = {{"kind", cfg.model_kind},
                {"T", cfg.model.horizon()},
                {"state_dim", cfg.model.state_dim()},
                {"obs_dim", cfg.model.obs_dim()},
                {"correlated_noise", cfg.model.has_cross_cov()},
                {"mean", vec_json(cfg.model.mean())},
                {"K", mat_json(cfg.model.cov())}};
  json gains = json::array();
  for (const auto& g : cfg.model.gains()) gains.push_back(mat_json(g));
  j["model"]["gains"] = gains;
  json Q = json::array();
  for (const auto& q : cfg.Q) Q.push_back(cfg.model.state_dim() == 1 ? json(q(0, 0)) : mat_json(q));
  j["risk"] = {{"mu", cfg.mu}, {"Q", Q}};
  j["n_paths"] = cfg.n_paths;
  j["seed"] = cfg.seed;
  j["criterion"] = to_string(cfg.criterion);
  if (cfg.Y) j["Y"] = vec_json(*cfg.Y);
  if (cfg.h) j["h"] = vec_json(*cfg.h);
  if (cfg.model.is_scalar()) j["sufficient_condition"] = sufficient_condition(cfg.model, cfg.scalar_risk());
  return j;
}

json to_json(const AffineFilter& f) { return {{"c", vec_json(f.c)}, {"G", mat_json(f.G)}}; }

AffineFilter affine_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object with c and G");
  AffineFilter f;
  f.c = vector(field(j, "c", where), join(where, "c"));
  f.G = matrix(field(j, "G", where), join(where, "G"));
  if (f.G.rows() != f.c.size() || f.G.cols() != f.c.size())
    throw ConfigError(join(where, "G") + ": expected a square matrix matching the length of c");
  for (Eigen::Index t = 0; t < f.G.rows(); ++t)
    for (Eigen::Index l = t + 1; l < f.G.cols(); ++l)
      if (f.G(t, l) != 0.0) throw ConfigError(join(where, "G") + ": filter must be causal (lower triangular)");
  return f;
}

json to_json(const VolterraSolution& sol) {
  json j;
  j["horizon"] = sol.horizon;
  j["dim"] = sol.dim;
  j["feasible"] = sol.feasible;
  if (sol.first_violation) {
    j["first_violation"] = *sol.first_violation;
    j["violated_clause"] = sol.violated_clause;
  }
  j["gamma"] = mat_json(sol.gamma);
  if (sol.S.size() > 0) j["S"] = vec_json(sol.S);
  return j;
}

json to_json(const FilterRun& run, const Eigen::VectorXd& Y) {
  json j;
  j["Y"] = vec_json(Y);
  j["h_bar"] = vec_json(run.h_bar);
  j["Z_h"] = vec_json(run.Z_h);
  j["Z_tilde"] = vec_json(run.Z_tilde);
  j["gamma_bar"] = vec_json(run.gamma_bar);
  j["gamma_tilde"] = vec_json(run.gamma_tilde);
  if (run.risk) j["risk"] = *run.risk;
  return j;
}

json to_json(const CMDecomposition& cm, const Eigen::VectorXd& Y) {
  json j;
  j["Y"] = vec_json(Y);
  j["nu"] = vec_json(cm.nu);
  j["pred"] = vec_json(cm.pred);
  j["gamma"] = vec_json(cm.gamma);
  j["gamma_bar"] = vec_json(cm.gamma_bar);
  j["Z_h"] = vec_json(cm.Z_h);
  j["Z_tilde"] = vec_json(cm.Z_tilde);
  j["gamma_tilde"] = vec_json(cm.gamma_tilde);
  j["log_factor"] = vec_json(cm.log_factor);
  j["exponent"] = vec_json(cm.exponent);
  j["log_M"] = vec_json(cm.log_M);
  j["log_I"] = vec_json(cm.log_I);
  j["I_T"] = cm.I_T();
  j["M_T"] = cm.M_T();
  return j;
}

json to_json(const RiskEstimate& est) {
  return {{"criterion", to_string(est.criterion)}, {"mean", est.mean},
          {"std_error", est.std_error},             {"n_paths", est.n_paths},
          {"log_abs_mean", est.log_abs_mean},       {"overflow_paths", est.overflow_paths}};
}

json to_json(const ComparisonReport& rep) {
  return {{"first", to_json(rep.first)},
          {"second", to_json(rep.second)},
          {"mean_difference", rep.mean_difference},
          {"difference_std_error", rep.difference_std_error},
          {"n_paths", rep.n_paths}};
}

json to_json(const LegVsRsReport& rep) {
  json j;
  j["T"] = rep.horizon;
  j["backward_riccati"] = {{"Gamma", vec_json(rep.riccati.Gamma)},
                           {"closed_form", vec_json(rep.riccati.closed_form)},
                           {"printed_form", vec_json(rep.riccati.printed_form)},
                           {"lambda", rep.riccati.lambda_const},
                           {"max_discrepancy", rep.riccati.max_discrepancy},
                           {"printed_form_discrepancy", rep.riccati.printed_discrepancy}};
  j["stated"] = {{"hbar1_coefficient", rep.stated_hbar1}, {"hhat1_coefficient", rep.stated_hhat1}};
  j["computed"] = {{"transformed_model_hbar1_coefficient", rep.transformed_model_hbar1},
                   {"hbar1_coefficient", rep.oracle_hbar1},
                   {"hhat1_coefficient", rep.oracle_hhat1},
                   {"pi1_over_1_plus_gamma1", rep.pi1_over_1_plus_gamma1},
                   {"tilted_a", vec_json(rep.tilted_a)},
                   {"tilted_D", vec_json(rep.tilted_D)},
                   {"stated_a", vec_json(rep.stated_a)}};
  if (rep.brute_force_hbar1) j["computed"]["brute_force_hbar1_coefficient"] = *rep.brute_force_hbar1;
  j["discrepancies"] = {{"hbar1_stated_minus_computed", rep.stated_hbar1 - rep.oracle_hbar1},
                        {"hhat1_stated_minus_computed", rep.stated_hhat1 - rep.oracle_hhat1}};
  j["hbar1_differs_from_hhat1"] = rep.differ;
  return j;
}

std::string to_csv(const FilterRun& run, const Eigen::VectorXd& Y) {
  std::ostringstream os;
  os << "t,Y,h_bar,Z_h,Z_tilde,gamma_bar,gamma_tilde\n";
  for (Eigen::Index t = 0; t < run.h_bar.size(); ++t)
    os << t + 1 << ',' << fmt(Y(t)) << ',' << fmt(run.h_bar(t)) << ',' << fmt(run.Z_h(t)) << ','
       << fmt(run.Z_tilde(t)) << ',' << fmt(run.gamma_bar(t)) << ',' << fmt(run.gamma_tilde(t)) << '\n';
  return os.str();
}

std::string to_csv(const CMDecomposition& cm, const Eigen::VectorXd& Y) {
  std::ostringstream os;
  os << "t,Y,nu,pred,gamma,gamma_bar,Z_h,Z_tilde,gamma_tilde,log_factor,exponent,log_M,log_I\n";
  for (int t = 0; t < cm.horizon(); ++t)
    os << t + 1 << ',' << fmt(Y(t)) << ',' << fmt(cm.nu(t)) << ',' << fmt(cm.pred(t)) << ',' << fmt(cm.gamma(t))
       << ',' << fmt(cm.gamma_bar(t)) << ',' << fmt(cm.Z_h(t)) << ',' << fmt(cm.Z_tilde(t)) << ','
       << fmt(cm.gamma_tilde(t)) << ',' << fmt(cm.log_factor(t)) << ',' << fmt(cm.exponent(t)) << ','
       << fmt(cm.log_M(t)) << ',' << fmt(cm.log_I(t)) << '\n';
  return os.str();
}

std::string to_csv(const VolterraSolution& sol) {
  std::ostringstream os;
  os << "t,s,gamma\n";
  for (int t = 0; t < sol.gamma.rows(); ++t)
    for (int s = 0; s <= t; ++s) os << t + 1 << ',' << s + 1 << ',' << fmt(sol.gamma(t, s)) << '\n';
  return os.str();
}

std::string batches_csv(const RiskEstimate& est) {
  std::ostringstream os;
  os << "batch,first_path,n_paths,sum,sum_sq,running_mean\n";
  double total = 0.0;
  long long count = 0;
  for (std::size_t b = 0; b < est.batches.size(); ++b) {
    const auto& x = est.batches[b];
    total += x.sum;
    count += x.n_paths;
    os << b << ',' << x.first_path << ',' << x.n_paths << ',' << fmt(x.sum) << ',' << fmt(x.sum_sq) << ','
       << fmt(total / static_cast<double>(count)) << '\n';
  }
  return os.str();
}

bool all_finite(const json& j) {
  if (j.is_number_float()) return std::isfinite(j.get<double>());
  if (j.is_array() || j.is_object()) {
    for (const auto& v : j)
      if (!all_finite(v)) return false;
  }
  return true;
}

}  // namespace rsfilt
