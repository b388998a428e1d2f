#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdcv/frame.hpp"

namespace mdcv {

struct ForestConfig {
  int n_trees = 500;
  int mtry = 0;      // 0 means ceil(p / 3)
  int min_leaf = 5;
  std::uint64_t seed = 1;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t level = -1;    // nominal split: this level goes left
  double threshold = 0.0;     // numeric split: <= threshold goes left
  double value = 0.0;         // mean outcome of the node's rows
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> row) const;
};

struct ForestFit {
  std::vector<std::string> features;
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<std::string>> levels;
  std::vector<RegressionTree> trees;
  std::vector<std::uint64_t> tree_seeds;
  int mtry = 1;
  int min_leaf = 5;
  int n_trees = 0;
};

/// Bagged regression trees over the predictor columns of `predictors`
/// (the outcome column, if any, is skipped). Splits minimize the summed
/// child squared error: numeric splits at midpoints between sorted distinct
/// values, nominal splits as one level versus the rest. Each child keeps at
/// least min_leaf rows; nodes with constant outcome are leaves.
ForestFit forest_fit(const Frame& predictors, std::span<const double> y, const ForestConfig& config);

std::vector<double> forest_predict(const ForestFit& fit, const Frame& frame);

}  // namespace mdcv
