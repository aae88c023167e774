#pragma once

// JSON configuration parsing and CSV/JSON serialization of results.

#include "rsfilt/cameron_martin.hpp"
#include "rsfilt/filter.hpp"
#include "rsfilt/model.hpp"
#include "rsfilt/oracle.hpp"
#include "rsfilt/sim.hpp"
#include "rsfilt/volterra.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace rsfilt {

struct ProblemConfig {
  std::string model_kind;
  GaussianModel model;
  double mu;
  std::vector<Eigen::MatrixXd> Q;  // per-step weights, state_dim x state_dim
  std::optional<Eigen::VectorXd> Y;
  std::optional<Eigen::VectorXd> h;
  FilterChoice filter;
  std::vector<FilterChoice> filters;  // for paired comparisons
  int n_paths = 10000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  Criterion criterion = Criterion::exponential;
  int batch_size = 10000;

  RiskSpec scalar_risk() const;
  MatrixRiskSpec matrix_risk() const;
  ExperimentConfig experiment(const FilterChoice& choice) const;
};

/// Throws ConfigError naming the offending field.
ProblemConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a config file; JSON syntax errors report line and column.
ProblemConfig load_config(const std::string& path);

/// Resolved parameters of a config, as echoed by `validate`.
nlohmann::json describe(const ProblemConfig& cfg);

nlohmann::json to_json(const AffineFilter& f);
AffineFilter affine_from_json(const nlohmann::json& j, const std::string& where = "affine");
FilterChoice filter_from_json(const nlohmann::json& j, const std::string& where = "filter");

nlohmann::json to_json(const VolterraSolution& sol);
nlohmann::json to_json(const FilterRun& run, const Eigen::VectorXd& Y);
nlohmann::json to_json(const CMDecomposition& cm, const Eigen::VectorXd& Y);
nlohmann::json to_json(const RiskEstimate& est);
nlohmann::json to_json(const ComparisonReport& rep);
nlohmann::json to_json(const LegVsRsReport& rep);

/// Columns: t,Y,h_bar,Z_h,Z_tilde,gamma_bar,gamma_tilde.
std::string to_csv(const FilterRun& run, const Eigen::VectorXd& Y);
std::string to_csv(const CMDecomposition& cm, const Eigen::VectorXd& Y);
std::string to_csv(const VolterraSolution& sol);
/// Columns: batch,first_path,n_paths,sum,sum_sq,running_mean.
std::string batches_csv(const RiskEstimate& est);

/// True when every number in the document is finite.
bool all_finite(const nlohmann::json& j);

}  // namespace rsfilt
