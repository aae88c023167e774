#pragma once

// Monte Carlo estimation of the exponential and mean-square criteria for
// causal affine filters, with common random numbers for comparisons.

#include "rsfilt/filter.hpp"
#include "rsfilt/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsfilt {

enum class FilterKind { leg, risk_neutral, custom };

struct FilterChoice {
  FilterKind kind = FilterKind::leg;
  std::optional<AffineFilter> custom;
};

enum class Criterion { exponential, mean_square };

struct ExperimentConfig {
  GaussianModel model;
  RiskSpec risk;
  FilterChoice filter;
  int n_paths = 10000;
  std::uint64_t seed = 0;
  Criterion criterion = Criterion::exponential;
  int batch_size = 10000;
};

struct BatchSum {
  int first_path;
  int n_paths;
  double sum;
  double sum_sq;
};

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_paths = 0;
  Criterion criterion = Criterion::exponential;
  /// log |mean|; stays finite when mean overflows (mu > 0).
  double log_abs_mean = 0.0;
  int overflow_paths = 0;
  std::vector<BatchSum> batches;
};

/// Affine coefficients of the configured filter (scalar models).
AffineFilter resolve_filter(const GaussianModel& model, const RiskSpec& risk, const FilterChoice& choice);

/// Per-path criterion values, in path order.
std::vector<double> path_values(const ExperimentConfig& config, const AffineFilter& filter);

RiskEstimate estimate_risk(const ExperimentConfig& config);

struct ComparisonReport {
  RiskEstimate first;
  RiskEstimate second;
  double mean_difference;  // first - second, paired by path
  double difference_std_error;
  int n_paths;
};

/// Both configs must share model, risk, seed, path count and criterion.
ComparisonReport compare_filters(const ExperimentConfig& first, const ExperimentConfig& second);

/// Worker count: hardware concurrency capped by RSFILT_THREADS.
int worker_count();

std::string to_string(Criterion c);

}  // namespace rsfilt
