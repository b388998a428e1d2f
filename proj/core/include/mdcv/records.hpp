#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mdcv {

/// Identifies one cell of a study design.
struct SettingKey {
  std::string scenario;   // S1, S2, S3, or real
  std::string mechanism;  // MCAR, MAR, or none
  std::size_t n_train = 0;
  std::size_t n_junk = 0;
  std::string model;      // lasso, ols, forest

  /// Stable identifier, for example S1_MCAR_n100_j10_lasso.
  std::string id() const;

  friend bool operator==(const SettingKey&, const SettingKey&) = default;
  friend auto operator<=>(const SettingKey&, const SettingKey&) = default;
};

enum class RecordStatus { complete, failed };

/// Wall-clock seconds for one replicate. Kept apart from the record so
/// that record files stay byte-identical across runs.
struct ReplicateTiming {
  std::size_t replicate = 0;
  double impute_during = 0.0;
  double impute_before = 0.0;
  double model_during = 0.0;
  double model_before = 0.0;
  double final_impute = 0.0;
  double final_model = 0.0;
};

struct ReplicateRecord {
  SettingKey setting;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  RecordStatus status = RecordStatus::complete;
  std::string error;

  std::vector<int> ks;
  std::vector<double> truth;   // true external R^2 per k
  std::vector<double> during;  // estimated R^2 per k, imputation during CV
  std::vector<double> before;  // estimated R^2 per k, imputation before CV
  int chosen_k_during = 0;
  int chosen_k_before = 0;
  double downstream_during = 0.0;  // true external R^2 at the chosen k
  double downstream_before = 0.0;
  std::optional<double> lambda_during;
  std::optional<double> lambda_before;
  std::optional<double> baseline;  // mean/mode imputation, when evaluated

  ReplicateTiming timing;

  bool complete() const noexcept { return status == RecordStatus::complete; }
  /// Truth and estimate at the workflow's chosen k.
  double truth_at(int k) const;
  double during_at(int k) const;
  double before_at(int k) const;
};

/// Records grouped by setting, each group sorted by replicate id.
using RecordSet = std::map<SettingKey, std::vector<ReplicateRecord>>;

RecordSet group_records(std::vector<ReplicateRecord> records);

/// Writes records/<id>.tsv and timings/<id>.tsv under `dir`, one file per
/// setting. Record columns, tab-separated, in this order:
///   scenario mechanism n_train n_junk model replicate seed status
///   chosen_k_during chosen_k_before downstream_during downstream_before
///   lambda_during lambda_before baseline
///   truth_k<k>... during_k<k>... before_k<k>...  error
/// Doubles use %.17g; absent values are written as NA.
void write_records(const RecordSet& records, const std::filesystem::path& dir);

/// Reads every records/<id>.tsv (and the matching timings file if present).
RecordSet read_records(const std::filesystem::path& dir);

std::string format_double(double v);
std::string format_double(const std::optional<double>& v);

}  // namespace mdcv
