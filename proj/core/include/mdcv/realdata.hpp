#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mdcv/ampute.hpp"
#include "mdcv/config.hpp"
#include "mdcv/csv.hpp"
#include "mdcv/experiment.hpp"
#include "mdcv/frame.hpp"

namespace mdcv {

/// Which CSV columns are used and how. Written in the config grammar:
///
///   outcome = Sale_Price
///   [columns]
///   Lot_Area = numeric
///   Garage_Type = nominal
///   [prototypes]
///   lot_garage = Lot_Area, Garage_Type
///
/// Columns are read in the order listed. Every prototype becomes one
/// missing-data pattern over the declared predictors.
struct DataSchema {
  std::string outcome;
  std::vector<std::pair<std::string, ColumnKind>> columns;  // predictors
  std::vector<std::pair<std::string, std::vector<std::string>>> prototypes;

  static DataSchema from_config(const Config& config);
  static DataSchema load(const std::filesystem::path& path);

  /// One pattern per prototype, as masks over the predictor columns.
  std::vector<MdPattern> patterns() const;
};

struct LoadedData {
  Frame frame;  // outcome first, then predictors in schema order
  std::size_t rows_read = 0;
  std::size_t rejected_parse = 0;    // wrong field count or unparseable number
  std::size_t rejected_missing = 0;  // a used cell was empty or NA
};

/// Builds a frame from the declared columns. Nominal level sets are the
/// sorted distinct values. Throws SchemaError if a declared column is
/// absent from the header.
LoadedData load_dataset(const CsvTable& table, const DataSchema& schema);

/// Shuffled split with round(train_fraction * n) training rows; both index
/// lists come back sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(std::size_t n, double train_fraction,
                                                                               std::uint64_t seed);

/// Merges the nominal levels whose share of the observed training cells is
/// below `threshold` into a level named "other", in both frames. A column
/// is left alone unless at least two levels fall below the threshold.
/// Returns the names of the lumped columns.
std::vector<std::string> lump_levels(Frame& train, Frame& test, double threshold);

/// Natural log of the outcome column; throws NumericError on values <= 0.
void log_outcome(Frame& frame);

/// Config keys (defaults in brackets):
///   n_replicates [10] base_seed [1] workers [1] train_fraction [0.75]
///   ks [1..35] v [10] models [ols, forest] mechanism [MAR]
///   prop_incomplete [0.5] amputate [true] lump_threshold [0.10]
///   log_outcome [true] output_dir [results]
///   [lasso] max_inner_folds n_lambda   [forest] n_trees mtry min_leaf
struct RealDataConfig {
  std::size_t n_replicates = 10;
  std::uint64_t base_seed = 1;
  int workers = 1;
  double train_fraction = 0.75;
  std::vector<int> ks;
  int v = 10;
  std::vector<ModelSpec> models;
  Mechanism mechanism = Mechanism::MAR;
  double prop_incomplete = 0.5;
  bool amputate = true;
  double lump_threshold = 0.10;
  bool log_outcome = true;
  std::filesystem::path output_dir = "results";
  std::string config_text;

  RealDataConfig();
  static RealDataConfig from_config(const Config& config);
  void validate() const;
};

struct RealDataRun {
  SimulationRun run;
  std::size_t rows_read = 0;
  std::size_t rows_used = 0;
  std::size_t rejected_parse = 0;
  std::size_t rejected_missing = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

/// Resampling study on one dataset. Every replicate splits, lumps,
/// amputes both parts with the schema's prototypes, and then for each
/// model runs both CV workflows, the per-k finalize sweep, and the
/// mean/mode baseline. Records use scenario "real".
RealDataRun run_realdata(const LoadedData& data, const DataSchema& schema, const RealDataConfig& config);

/// File-level entry: loads, runs, and writes records plus emitted tables
/// (into output_dir/tables) with row-rejection counts in the manifests.
RealDataRun run_realdata(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path,
                         const RealDataConfig& config);

}  // namespace mdcv
