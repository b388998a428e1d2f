#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mdcv/forest.hpp"
#include "mdcv/frame.hpp"
#include "mdcv/lasso.hpp"

namespace mdcv {

/// A trained prediction function over frames with the training schema.
struct FittedModel {
  std::function<std::vector<double>(const Frame&)> predict;
  std::optional<double> lambda;  // set by penalized learners
};

/// Fits a model to a fully observed frame with an outcome column.
using Learner = std::function<FittedModel(const Frame& train, std::uint64_t seed)>;

/// Inner fold count for cv_lasso on an n-row set: min(max_folds, n / 2).
int inner_fold_count(std::size_t n, int max_folds = 10);

/// cv_lasso with inner_fold_count(n) folds; predictions at the lambda with
/// the smallest cross-validated RMSE.
Learner lasso_learner(int max_inner_folds = 10, LassoOptions options = {});

/// Unpenalized least squares on the treatment-coded design.
Learner ols_learner();

/// Regression forest; the learner seed replaces config.seed.
Learner forest_learner(ForestConfig config = {});

}  // namespace mdcv
