#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mdcv/records.hpp"
#include "mdcv/summary.hpp"

namespace mdcv {

/// Tab-separated output files written by emit_outputs. Table cells are
/// scaled by 100 and printed with two decimals; Overall rows carry
/// "Overall" in the n_train and n_junk columns.
///
///   table1_truth.tsv       mean (sd) true external R^2, pooled over k
///   table2_difference.tsv  mean (sd) |during - before| per k
///   table3_bias.tsv        bias, per-k pooled and at the chosen k
///   table4_sd.tsv          SD of the estimates, per-k pooled and chosen k
///   table5_rmse.tsv        RMSE, per-k pooled and at the chosen k
///   table6_downstream.tsv  mean (sd) external R^2 at each workflow's chosen k
///   curves.tsv             setting, series, k, mean, sd (unscaled R^2)
///   timing.tsv             per-replicate imputation seconds per workflow
///   timing_summary.tsv     during/before ratio mean, median, quartiles
///   manifest.json          config echo, version, completion counts
std::vector<std::string> emitted_files();

/// Writes every file above into `dir`, overwriting. Output depends only on
/// the arguments, so identical inputs give byte-identical files.
void emit_outputs(const MetricSummary& summary, const RecordSet& records, const std::filesystem::path& dir,
                  const std::string& config_text, const std::map<std::string, std::string>& extra = {});

/// Reads records from `records_dir` (and the config echoed in its
/// manifest, if any) and emits into `out_dir`. Returns the summary.
MetricSummary emit_from_records(const std::filesystem::path& records_dir, const std::filesystem::path& out_dir);

/// Human-readable rendering of the main columns, for terminals.
std::string render_summary(const MetricSummary& summary);

/// Config text stored in `dir`/manifest.json, or empty when absent.
std::string manifest_config(const std::filesystem::path& dir);

}  // namespace mdcv
