#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdcv/frame.hpp"

namespace mdcv {

/// Numeric predictors pass through; each nominal predictor with L levels
/// becomes L - 1 treatment dummies (first declared level is the baseline).
/// Requires every predictor cell observed.
Eigen::MatrixXd design_matrix(const Frame& frame);

std::vector<std::string> design_names(const Frame& frame);

/// Copies of the selected rows.
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows);
Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows);

}  // namespace mdcv
