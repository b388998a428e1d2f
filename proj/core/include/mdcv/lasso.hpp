#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mdcv {

struct LassoOptions {
  int n_lambda = 100;
  // Defaults to 1e-4 when n > p and 1e-2 otherwise.
  std::optional<double> lambda_min_ratio;
  double tolerance = 1e-7;  // max |coefficient change| per sweep, standardized scale
  int max_sweeps = 100000;
  // Keep the penalized objective after every sweep (diagnostics).
  bool record_objective = false;
};

/// Solutions of (1/2n)||y - b0 - Xb||^2 + lambda ||b||_1 along a decreasing
/// lambda sequence, solved on internally standardized predictors and
/// reported on the original scale.
struct LassoPath {
  std::vector<double> lambdas;
  Eigen::MatrixXd coefficients;       // p x L, original scale
  Eigen::MatrixXd std_coefficients;   // p x L, standardized scale
  std::vector<double> intercepts;     // L
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_sd;               // population sd; 0 marks a constant column
  double y_mean = 0.0;
  std::vector<int> sweeps;            // per lambda
  bool converged = true;
  std::vector<std::vector<double>> objective_trace;  // per lambda, when recorded

  std::size_t size() const noexcept { return lambdas.size(); }
  Eigen::VectorXd predict(const Eigen::MatrixXd& x, std::size_t index) const;
  /// n x L predictions for every lambda.
  Eigen::MatrixXd predict_all(const Eigen::MatrixXd& x) const;
};

/// lambda_max = max_j |<x_j, y - ybar>| / n on standardized predictors,
/// followed by n_lambda - 1 log-spaced values down to lambda_max * ratio.
std::vector<double> lambda_sequence(const Eigen::MatrixXd& x, std::span<const double> y,
                                    const LassoOptions& options = {});

LassoPath lasso_path(const Eigen::MatrixXd& x, std::span<const double> y,
                     const LassoOptions& options = {});

/// Same, on a caller-supplied decreasing lambda sequence.
LassoPath lasso_path(const Eigen::MatrixXd& x, std::span<const double> y,
                     std::span<const double> lambdas, const LassoOptions& options = {});

struct LassoCvFit {
  LassoPath path;                // fit on all rows
  std::vector<double> cv_rmse;   // pooled held-out RMSE per lambda
  std::size_t best = 0;          // first index attaining the minimum
  double lambda = 0.0;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// v-fold CV over a lambda sequence shared by every fold (taken from the
/// full data). Held-out predictions are pooled before computing the RMSE.
LassoCvFit cv_lasso(const Eigen::MatrixXd& x, std::span<const double> y, int v,
                    std::uint64_t seed, const LassoOptions& options = {});

/// Largest violation of the lasso optimality conditions at path index
/// `index`, on the standardized scale: for zero coefficients the excess of
/// |<x_j, r>/n| over lambda, for active ones the gap to lambda * sign(b_j).
double kkt_violation(const Eigen::MatrixXd& x, std::span<const double> y, const LassoPath& path,
                     std::size_t index);

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace mdcv
