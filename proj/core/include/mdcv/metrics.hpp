#pragma once

#include <span>

namespace mdcv {

/// 1 - SSE / SST with SST around the mean of y_true. May be negative.
double r_squared(std::span<const double> y_true, std::span<const double> y_pred);

double rmse(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace mdcv
