#pragma once

#include <span>

#include <Eigen/Dense>

namespace mdcv {

struct LinearFit {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Least squares with an unpenalized intercept. Rank-deficient designs get
/// the minimum-norm coefficient vector, so fitted values stay well defined.
LinearFit ols_fit(const Eigen::MatrixXd& x, std::span<const double> y);

}  // namespace mdcv
