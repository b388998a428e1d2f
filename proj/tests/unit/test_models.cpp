#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "mdcv/design.hpp"
#include "mdcv/error.hpp"
#include "mdcv/forest.hpp"
#include "mdcv/learners.hpp"
#include "mdcv/metrics.hpp"
#include "mdcv/ols.hpp"
#include "test_support.hpp"

namespace mdcv {
namespace {

TEST(RSquaredTest, Examples) {
  const std::vector<double> y = {0.0, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(r_squared(y, y), 1.0);
  EXPECT_DOUBLE_EQ(r_squared(y, std::vector<double>{1.0, 1.0, 1.0}), 0.0);
  EXPECT_DOUBLE_EQ(r_squared(y, std::vector<double>{0.0, 0.0, 0.0}), -1.5);
}

TEST(RSquaredTest, UndefinedCases) {
  EXPECT_THROW(r_squared(std::vector<double>{2.0, 2.0}, std::vector<double>{1.0, 3.0}), UndefinedMetric);
  EXPECT_THROW(r_squared(std::vector<double>{2.0}, std::vector<double>{1.0}), UndefinedMetric);
  EXPECT_THROW(r_squared(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), SchemaError);
}

TEST(RSquaredTest, InvariantToCommonShift) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  std::vector<double> y(50), p(50);
  for (std::size_t i = 0; i < 50; ++i) y[i] = z(gen), p[i] = y[i] + 0.5 * z(gen);
  const double base = r_squared(y, p);
  for (auto& v : y) v += 3.0;
  for (auto& v : p) v += 3.0;
  EXPECT_NEAR(r_squared(y, p), base, 1e-12);
  EXPECT_NEAR(rmse(std::vector<double>{0.0, 0.0}, std::vector<double>{3.0, 4.0}), std::sqrt(12.5), 1e-15);
}

TEST(OlsTest, SquareSystemHasZeroResiduals) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(4, 3);
  x.row(3) << 1.0, 2.0, -1.0;
  const std::vector<double> y = {3.0, -1.0, 2.0, 0.5};
  const auto fit = ols_fit(x, y);
  const auto pred = fit.predict(x);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(pred(i), y[static_cast<std::size_t>(i)], 1e-12);
}

TEST(OlsTest, DuplicatedColumnLeavesPredictionsUnchanged) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(40, 2);
  std::vector<double> y(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = z(gen), x(i, 1) = z(gen);
    y[static_cast<std::size_t>(i)] = 1.0 + x(i, 0) - 2.0 * x(i, 1) + z(gen);
  }
  Eigen::MatrixXd dup(40, 3);
  dup << x, x.col(1);
  const auto a = ols_fit(x, y).predict(x);
  const auto fit = ols_fit(dup, y);
  const auto b = fit.predict(dup);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
  // Minimum norm splits the duplicated effect evenly.
  EXPECT_NEAR(fit.coefficients(1), fit.coefficients(2), 1e-10);
}

TEST(OlsTest, MatchesNormalEquations) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  for (int t = 0; t < 20; ++t) {
    const int n = 60, p = 6;
    Eigen::MatrixXd x(n, p);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) x(i, j) = z(gen) + 0.2 * j;
      y[static_cast<std::size_t>(i)] = z(gen) + x(i, 0);
    }
    Eigen::MatrixXd a(n, p + 1);
    a.col(0).setOnes();
    a.rightCols(p) = x;
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const Eigen::VectorXd beta = (a.transpose() * a).llt().solve(a.transpose() * yv);
    const auto fit = ols_fit(x, y);
    EXPECT_NEAR(fit.intercept, beta(0), 1e-8);
    for (int j = 0; j < p; ++j) EXPECT_NEAR(fit.coefficients(j), beta(j + 1), 1e-8);
  }
}

TEST(OlsTest, NonFiniteInputRejected) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 1);
  x(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ols_fit(x, std::vector<double>{1, 2, 3}), NumericError);
}

TEST(DesignTest, TreatmentDummies) {
  const Frame f({Column::numeric("y", {1, 2, 3}), Column::numeric("a", {0.5, 1.5, 2.5}),
                 Column::nominal("g", {"p", "q", "r"}, {0, 2, 1})},
                "y");
  const auto x = design_matrix(f);
  ASSERT_EQ(x.cols(), 3);
  EXPECT_EQ(design_names(f), (std::vector<std::string>{"a", "g=q", "g=r"}));
  EXPECT_EQ(x(1, 2), 1.0);
  EXPECT_EQ(x(1, 1), 0.0);
  EXPECT_EQ(x(2, 1), 1.0);
  EXPECT_EQ(x(0, 1) + x(0, 2), 0.0);
  Frame g = f;
  g.mutable_column(1).set_missing(0);
  EXPECT_THROW(design_matrix(g), PreconditionError);
}

Frame square_frame(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::normal_distribution<double> z;
  std::vector<double> x(n), noise(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = u(gen);
    noise[i] = z(gen);
    y[i] = x[i] * x[i] + 0.1 * z(gen);
  }
  return Frame({Column::numeric("y", y), Column::numeric("x1", x), Column::numeric("n1", noise)}, "y");
}

TEST(ForestTest, ConstantOutcome) {
  const auto f = square_frame(100, 1);
  const std::vector<double> y(100, 4.25);
  ForestConfig cfg;
  cfg.n_trees = 20;
  for (double p : forest_predict(forest_fit(f, y, cfg), f)) EXPECT_EQ(p, 4.25);
}

TEST(ForestTest, PredictionsWithinTrainingRange) {
  const auto f = square_frame(300, 2);
  const auto test = square_frame(200, 3);
  const auto y = f.outcome();
  ForestConfig cfg;
  cfg.n_trees = 50;
  const auto fit = forest_fit(f, y, cfg);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  for (double p : forest_predict(fit, test)) {
    EXPECT_GE(p, *lo);
    EXPECT_LE(p, *hi);
  }
  EXPECT_EQ(fit.mtry, 1);  // ceil(2 / 3)
}

TEST(ForestTest, BeatsLinearModelOnQuadratic) {
  const auto train = square_frame(2000, 4);
  const auto test = square_frame(2000, 5);
  ForestConfig cfg;
  cfg.n_trees = 100;
  cfg.mtry = 2;
  const auto forest = forest_fit(train, train.outcome(), cfg);
  const double rf = r_squared(test.outcome(), forest_predict(forest, test));
  const auto linear = ols_fit(design_matrix(train), train.outcome());
  const auto lp = linear.predict(design_matrix(test));
  const double lm = r_squared(test.outcome(), std::vector<double>(lp.data(), lp.data() + lp.size()));
  EXPECT_GE(rf - lm, 0.3) << "forest " << rf << " linear " << lm;
}

TEST(ForestTest, NominalSplitsAndDeterminism) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> z;
  const std::size_t n = 400;
  std::vector<std::int32_t> g(n);
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = static_cast<std::int32_t>(i % 4);
    x[i] = z(gen);
    y[i] = (g[i] == 2 ? 5.0 : 0.0) + 0.1 * z(gen);
  }
  const Frame f({Column::numeric("y", y), Column::numeric("x", x), Column::nominal("g", {"a", "b", "c", "d"}, g)},
                "y");
  ForestConfig cfg;
  cfg.n_trees = 30;
  cfg.mtry = 2;
  cfg.seed = 9;
  const auto a = forest_fit(f, y, cfg);
  const auto pa = forest_predict(a, f);
  EXPECT_EQ(pa, forest_predict(forest_fit(f, y, cfg), f));
  EXPECT_GT(r_squared(y, pa), 0.95);
  cfg.seed = 10;
  EXPECT_NE(pa, forest_predict(forest_fit(f, y, cfg), f));
}

TEST(ForestTest, Errors) {
  const auto f = square_frame(10, 1);
  const auto y = f.outcome();
  EXPECT_THROW(forest_fit(f.take_rows(std::vector<std::size_t>{}), std::vector<double>{}, {}), InvalidConfiguration);
  Frame g = f;
  g.mutable_column(1).set_missing(3);
  EXPECT_THROW(forest_fit(g, y, {}), PreconditionError);
  const auto fit = forest_fit(f, y, {});
  const Frame other({Column::numeric("y", {1.0}), Column::numeric("z", {1.0}), Column::numeric("n1", {0.0})}, "y");
  EXPECT_THROW(forest_predict(fit, other), SchemaError);
}

TEST(LearnerTest, InnerFoldCount) {
  EXPECT_EQ(inner_fold_count(100), 10);
  EXPECT_EQ(inner_fold_count(90), 10);
  EXPECT_EQ(inner_fold_count(12), 6);
  EXPECT_EQ(inner_fold_count(3), 1);
}

TEST(LearnerTest, AllFamiliesPredictOnFrames) {
  std::mt19937_64 gen(12);
  const auto train = testing::gaussian_frame(gen, 120, 4);
  const auto test = testing::gaussian_frame(gen, 80, 4);
  const auto lasso = lasso_learner()(train, 3);
  ASSERT_TRUE(lasso.lambda.has_value());
  EXPECT_GT(r_squared(test.outcome(), lasso.predict(test)), 0.5);
  EXPECT_EQ(lasso.predict(test), lasso_learner()(train, 3).predict(test));
  const auto ols = ols_learner()(train, 0);
  EXPECT_FALSE(ols.lambda.has_value());
  EXPECT_GT(r_squared(test.outcome(), ols.predict(test)), 0.5);
  ForestConfig cfg;
  cfg.n_trees = 50;
  const auto forest = forest_learner(cfg)(train, 1);
  EXPECT_EQ(forest.predict(test).size(), test.n_rows());
}

}  // namespace
}  // namespace mdcv
