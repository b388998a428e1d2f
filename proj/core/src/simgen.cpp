#include "mdcv/simgen.hpp"

#include <cmath>
#include <string>

#include "mdcv/error.hpp"
#include "mdcv/random.hpp"

namespace mdcv {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
  }
  return "?";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "S1" || text == "1") return Scenario::S1;
  if (text == "S2" || text == "2") return Scenario::S2;
  if (text == "S3" || text == "3") return Scenario::S3;
  throw InvalidConfiguration("unknown scenario '" + std::string(text) + "'");
}

void GenConfig::validate() const {
  if (!(std::abs(rho) < 1.0)) throw InvalidConfiguration("|rho| must be < 1");
  if (!(sigma_eps > 0.0)) throw InvalidConfiguration("sigma_eps must be > 0");
  if (beta.empty()) throw InvalidConfiguration("beta must be nonempty");
  if (n_train == 0 || n_valid == 0) throw InvalidConfiguration("row counts must be positive");
  if (scenario != Scenario::S1) {
    if (n_groups < 2) throw InvalidConfiguration("grouped scenarios need n_groups >= 2");
    if (n_train < static_cast<std::size_t>(n_groups - 1))
      throw InvalidConfiguration("n_train smaller than the training group count");
    if (!(group_mean_sd >= 0.0)) throw InvalidConfiguration("group_mean_sd must be >= 0");
  }
}

Eigen::MatrixXd mvn_ar1_sample(std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
  if (!(std::abs(rho) < 1.0)) throw InvalidConfiguration("|rho| must be < 1");
  if (p < 1) throw InvalidConfiguration("dimension must be >= 1");
  Rng rng(seed);
  const double innov = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd x(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    double prev = rng.normal();
    x(i, 0) = prev;
    for (std::size_t j = 1; j < p; ++j) {
      prev = rho * prev + innov * rng.normal();
      x(i, j) = prev;
    }
  }
  return x;
}

namespace {

// Per-stream seeds so each block of draws is independent of the others'
// sizes.
enum Stream : std::uint64_t {
  kOffsets = 1,
  kTrainX = 2,
  kTrainJunk = 3,
  kTrainEps = 4,
  kValidX = 5,
  kValidJunk = 6,
  kValidEps = 7,
};

Frame build_frame(const Eigen::MatrixXd& x, const Eigen::MatrixXd& junk,
                  const std::vector<double>& beta, double sigma_eps,
                  const std::vector<int>& group, const Eigen::MatrixXd& offsets,
                  std::uint64_t eps_seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  const auto q = static_cast<std::size_t>(junk.cols());
  const bool shifted = offsets.size() > 0;

  std::vector<std::vector<double>> xs(p, std::vector<double>(n));
  std::vector<std::vector<double>> js(q, std::vector<double>(n));
  std::vector<double> y(n);
  Rng eps(eps_seed);
  for (std::size_t i = 0; i < n; ++i) {
    double lin = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      double v = x(i, j);
      if (shifted) v += offsets(group[i], j);
      xs[j][i] = v;
      lin += beta[j] * v;
    }
    for (std::size_t j = 0; j < q; ++j) {
      double v = junk(i, j);
      if (shifted) v += offsets(group[i], p + j);
      js[j][i] = v;
    }
    y[i] = lin + sigma_eps * eps.normal();
  }

  std::vector<Column> cols;
  cols.reserve(1 + p + q);
  cols.push_back(Column::numeric("y", std::move(y)));
  for (std::size_t j = 0; j < p; ++j)
    cols.push_back(Column::numeric("x" + std::to_string(j + 1), std::move(xs[j])));
  for (std::size_t j = 0; j < q; ++j)
    cols.push_back(Column::numeric("j" + std::to_string(j + 1), std::move(js[j])));
  return Frame(std::move(cols), "y");
}

Eigen::MatrixXd iid_normal(std::size_t n, std::size_t q, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, q);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < q; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

GeneratedData generate(const GenConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t p = config.beta.size();
  const std::size_t q = config.n_junk;
  const bool grouped = config.scenario != Scenario::S1;

  Eigen::MatrixXd offsets;
  std::vector<int> train_group(config.n_train, 0);
  std::vector<int> valid_group(config.n_valid, 0);
  if (grouped) {
    Rng rng(mix_seed(seed, kOffsets));
    offsets.resize(config.n_groups, static_cast<Eigen::Index>(p + q));
    for (int g = 0; g < config.n_groups; ++g)
      for (std::size_t j = 0; j < p + q; ++j)
        offsets(g, static_cast<Eigen::Index>(j)) = config.group_mean_sd * rng.normal();
    const int n_train_groups = config.n_groups - 1;
    for (std::size_t i = 0; i < config.n_train; ++i)
      train_group[i] = static_cast<int>(i % static_cast<std::size_t>(n_train_groups));
    valid_group.assign(config.n_valid, n_train_groups);
  }

  GeneratedData out;
  out.train = build_frame(mvn_ar1_sample(config.n_train, p, config.rho, mix_seed(seed, kTrainX)),
                          iid_normal(config.n_train, q, mix_seed(seed, kTrainJunk)), config.beta,
                          config.sigma_eps, train_group, offsets, mix_seed(seed, kTrainEps));
  out.valid = build_frame(mvn_ar1_sample(config.n_valid, p, config.rho, mix_seed(seed, kValidX)),
                          iid_normal(config.n_valid, q, mix_seed(seed, kValidJunk)), config.beta,
                          config.sigma_eps, valid_group, offsets, mix_seed(seed, kValidEps));
  if (config.scenario == Scenario::S2) out.train_groups = std::move(train_group);
  return out;
}

std::vector<double> simulated_noise(const GenConfig& config, std::uint64_t seed,
                                    bool validation) {
  config.validate();
  Rng eps(mix_seed(seed, validation ? kValidEps : kTrainEps));
  std::vector<double> out(validation ? config.n_valid : config.n_train);
  for (auto& e : out) e = config.sigma_eps * eps.normal();
  return out;
}

double population_r_squared(const GenConfig& config) {
  const std::size_t p = config.beta.size();
  double quad = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      quad += config.beta[i] * config.beta[j] *
              std::pow(config.rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
  return quad / (quad + config.sigma_eps * config.sigma_eps);
}

}  // namespace mdcv
