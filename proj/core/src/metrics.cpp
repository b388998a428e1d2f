#include "mdcv/metrics.hpp"

#include <cmath>

#include "mdcv/error.hpp"

namespace mdcv {

double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw SchemaError("r_squared: length mismatch");
  if (y_true.size() < 2) throw UndefinedMetric("r_squared needs at least two observations");
  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= static_cast<double>(y_true.size());
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_true[i] - y_pred[i];
    const double d = y_true[i] - mean;
    sse += e * e;
    sst += d * d;
  }
  if (sst == 0.0) throw UndefinedMetric("r_squared is undefined for a constant outcome");
  return 1.0 - sse / sst;
}

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw SchemaError("rmse: length mismatch");
  if (y_true.empty()) throw UndefinedMetric("rmse of an empty sample");
  double sse = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_true[i] - y_pred[i];
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(y_true.size()));
}

}  // namespace mdcv
