#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mdcv/frame.hpp"

namespace mdcv {

enum class Scenario { S1, S2, S3 };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view text);

/// Settings for one simulated replicate.
struct GenConfig {
  std::size_t n_train = 500;
  std::size_t n_valid = 10000;
  std::vector<double> beta = {-1.00, -0.78, -0.56, -0.33, -0.11,
                              0.11,  0.33,  0.56,  0.78,  1.00};
  double rho = 0.75;
  double sigma_eps = 1.0;
  std::size_t n_junk = 10;
  Scenario scenario = Scenario::S1;
  int n_groups = 11;
  double group_mean_sd = 1.0;

  void validate() const;
};

struct GeneratedData {
  Frame train;  // columns: y, x1..x10, j1..jN
  Frame valid;
  std::optional<std::vector<int>> train_groups;  // exposed under S2 only
};

/// n x p draws from N(0, Sigma) with Sigma_ij = rho^|i-j|, by the AR(1)
/// recursion x_1 = z_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j.
Eigen::MatrixXd mvn_ar1_sample(std::size_t n, std::size_t p, double rho, std::uint64_t seed);

/// Linear-Gaussian training and validation sets. Under S2/S3 the training
/// rows are split evenly over n_groups - 1 groups and the validation set is
/// the remaining group; every group shifts all non-outcome columns by its
/// own offset vector. S2 and S3 draw identical data for one seed.
GeneratedData generate(const GenConfig& config, std::uint64_t seed);

/// The error draws used by generate() for the training (or validation)
/// outcome, already scaled by sigma_eps.
std::vector<double> simulated_noise(const GenConfig& config, std::uint64_t seed, bool validation);

/// Population R^2 of the true linear predictor, b'Sb / (b'Sb + sigma^2).
double population_r_squared(const GenConfig& config);

}  // namespace mdcv
