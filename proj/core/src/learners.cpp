#include "mdcv/learners.hpp"

#include <algorithm>
#include <memory>

#include "mdcv/design.hpp"
#include "mdcv/error.hpp"
#include "mdcv/ols.hpp"

namespace mdcv {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

int inner_fold_count(std::size_t n, int max_folds) {
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_folds), n / 2));
}

Learner lasso_learner(int max_inner_folds, LassoOptions options) {
  return [max_inner_folds, options](const Frame& train, std::uint64_t seed) {
    const auto x = design_matrix(train);
    const auto y = train.outcome();
    const int v = inner_fold_count(train.n_rows(), max_inner_folds);
    if (v < 2) throw InvalidConfiguration("too few rows for inner cross-validation");
    auto fit = std::make_shared<const LassoCvFit>(cv_lasso(x, y, v, seed, options));
    FittedModel model;
    model.lambda = fit->lambda;
    model.predict = [fit](const Frame& frame) { return to_vector(fit->predict(design_matrix(frame))); };
    return model;
  };
}

Learner ols_learner() {
  return [](const Frame& train, std::uint64_t) {
    auto fit = std::make_shared<const LinearFit>(ols_fit(design_matrix(train), train.outcome()));
    FittedModel model;
    model.predict = [fit](const Frame& frame) { return to_vector(fit->predict(design_matrix(frame))); };
    return model;
  };
}

Learner forest_learner(ForestConfig config) {
  return [config](const Frame& train, std::uint64_t seed) {
    ForestConfig c = config;
    c.seed = seed;
    auto fit = std::make_shared<const ForestFit>(forest_fit(train, train.outcome(), c));
    FittedModel model;
    model.predict = [fit](const Frame& frame) { return forest_predict(*fit, frame); };
    return model;
  };
}

}  // namespace mdcv
