#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdcv/ampute.hpp"
#include "mdcv/config.hpp"
#include "mdcv/forest.hpp"
#include "mdcv/learners.hpp"
#include "mdcv/records.hpp"
#include "mdcv/simgen.hpp"

namespace mdcv {

/// Model family used inside both workflows and for the final fits.
struct ModelSpec {
  std::string family = "lasso";  // lasso, ols, forest
  int max_inner_folds = 10;
  LassoOptions lasso;
  ForestConfig forest;

  Learner learner() const;
};

/// A simulation campaign: the cartesian product of scenarios, mechanisms,
/// training sizes, and junk counts, each run for n_replicates replicates.
///
/// Config keys (all optional; defaults in brackets):
///   scenarios [S1] mechanisms [MCAR] n_train [500] n_junk [10]
///   ks [1..15] v [10] n_replicates [10] base_seed [1] workers [1]
///   n_valid [10000] prop_incomplete [0.9] group_mean_sd [1] rho [0.75]
///   sigma_eps [1] model [lasso] fault_rate [0] output_dir [results]
///   [lasso] max_inner_folds n_lambda lambda_min_ratio tolerance
///   [forest] n_trees mtry min_leaf
struct ExperimentConfig {
  std::vector<Scenario> scenarios = {Scenario::S1};
  std::vector<Mechanism> mechanisms = {Mechanism::MCAR};
  std::vector<std::size_t> n_train = {500};
  std::vector<std::size_t> n_junk = {10};
  std::vector<int> ks = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  int v = 10;
  std::size_t n_replicates = 10;
  std::uint64_t base_seed = 1;
  std::size_t n_valid = 10000;
  double prop_incomplete = 0.90;
  double group_mean_sd = 1.0;
  double rho = 0.75;
  double sigma_eps = 1.0;
  ModelSpec model;
  // Probability that a replicate raises a deliberate failure before doing
  // any work, drawn from the replicate seed. Exercises failure handling.
  double fault_rate = 0.0;
  int workers = 1;
  std::filesystem::path output_dir = "results";
  std::string config_text;  // echoed into the manifest

  // When set, only these (setting id, replicate) pairs are run.
  std::optional<std::map<std::string, std::set<std::size_t>>> only;

  static ExperimentConfig from_config(const Config& config);
  void validate() const;

  std::vector<SettingKey> settings() const;
  GenConfig gen_config(const SettingKey& setting) const;
};

/// seed = mix(mix(base_seed, hash(setting id)), replicate).
std::uint64_t replicate_seed(std::uint64_t base_seed, const SettingKey& setting, std::size_t replicate);

struct SimulationRun {
  RecordSet records;
  std::size_t scheduled = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  bool all_complete() const noexcept { return failed == 0 && completed == scheduled; }
};

/// Generates, amputes, and evaluates one replicate. Errors propagate.
ReplicateRecord run_replicate(const ExperimentConfig& config, const SettingKey& setting, std::size_t replicate);

/// Runs every scheduled replicate on `workers` threads. A replicate that
/// throws is recorded with status failed and its message; the run goes on.
/// The result is independent of the worker count and of completion order.
SimulationRun run_simulation(const ExperimentConfig& config,
                             const std::function<void(const ReplicateRecord&)>& on_done = {});

/// Generic keyed pool: runs task(i) for i in [0, n) on `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task);

/// Writes records, timings, and manifest.json into `dir`.
void persist_run(const SimulationRun& run, const std::string& config_text, const std::filesystem::path& dir,
                 const std::map<std::string, std::string>& extra = {});

/// Replicate ids with status failed, keyed by setting id.
std::map<std::string, std::set<std::size_t>> failed_replicates(const RecordSet& records);

/// Library version string recorded in manifests.
std::string library_version();

/// Creates `dir` and checks that files can be written there.
void ensure_writable(const std::filesystem::path& dir);

}  // namespace mdcv
