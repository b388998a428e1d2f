#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdcv/records.hpp"

namespace mdcv {

/// Error statistics of estimates against the truth they target.
struct ErrorStats {
  std::size_t count = 0;
  double bias = 0.0;            // mean(estimate - truth)
  double sd_error = 0.0;        // sample SD of (estimate - truth)
  double var_error_pop = 0.0;   // n-denominator variance of (estimate - truth)
  double rmse = 0.0;            // sqrt(mean((estimate - truth)^2))
  double mean_estimate = 0.0;
  double sd_estimate = 0.0;     // sample SD of the estimates
  double mean_truth = 0.0;
};

/// Requires equal lengths and at least two pairs.
ErrorStats error_stats(std::span<const double> estimate, std::span<const double> truth);

struct MeanSd {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample SD
};

MeanSd mean_sd(std::span<const double> values);

/// Median and quartiles by linear interpolation between order statistics.
struct Quantiles {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

Quantiles quantiles(std::vector<double> values);

struct WorkflowSummary {
  ErrorStats per_k;   // pooled over (replicate, k)
  ErrorStats chosen;  // estimate and truth at the workflow's chosen k
  MeanSd downstream;  // true external R^2 at the chosen k
};

/// One summary row. Rows are per setting, or Overall rows that pool the
/// settings sharing scenario, mechanism, and model across n_train and
/// junk count (n_train = 0 and n_junk = 0 mark them).
struct SettingSummary {
  SettingKey key;
  bool overall = false;
  std::size_t replicates = 0;  // complete records used
  std::size_t failed = 0;
  MeanSd truth;                // true external R^2 pooled over (replicate, k)
  MeanSd abs_difference;       // |during - before| pooled over (replicate, k)
  WorkflowSummary during;
  WorkflowSummary before;
  std::optional<MeanSd> baseline;
  MeanSd timing_ratio;         // impute_during / impute_before per replicate
  Quantiles timing_quantiles;
  MeanSd impute_during_seconds;
  MeanSd impute_before_seconds;

  std::string label() const;   // setting id, or scenario_mechanism_model_overall
};

struct MetricSummary {
  std::vector<SettingSummary> rows;
  std::vector<std::string> warnings;  // omitted cells
};

/// Failed records are excluded. Cells with fewer than two complete records
/// are omitted with a warning.
MetricSummary summarize(const RecordSet& records);

}  // namespace mdcv
