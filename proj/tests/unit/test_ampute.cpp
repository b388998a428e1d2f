#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "logistic.hpp"
#include "mdcv/ampute.hpp"
#include "mdcv/error.hpp"
#include "mdcv/random.hpp"
#include "mdcv/simgen.hpp"

namespace mdcv {
namespace {

// Complete frame with outcome y and p standard-normal columns, adjacent
// columns correlated by rho.
Frame complete_frame(std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
  const auto x = mvn_ar1_sample(n, p, rho, seed);
  std::vector<Column> cols;
  std::vector<double> y(n);
  Rng rng(seed ^ 0x55);
  for (auto& v : y) v = rng.normal();
  cols.push_back(Column::numeric("y", y));
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    cols.push_back(Column::numeric("v" + std::to_string(j), std::move(v)));
  }
  return Frame(std::move(cols), "y");
}

std::vector<int> incomplete_rows(const Frame& f) {
  std::vector<int> out(f.n_rows(), 0);
  for (auto j : f.predictor_indices())
    for (std::size_t i = 0; i < f.n_rows(); ++i)
      if (f.column(j).missing(i)) out[i] = 1;
  return out;
}

MdPattern row_mask(const Frame& f, std::size_t row) {
  MdPattern m;
  for (auto j : f.predictor_indices()) m.mask.push_back(f.column(j).missing(row) ? 1 : 0);
  return m;
}

TEST(PatternTest, TwoColumnsGiveSingleMissingColumn) {
  for (std::uint64_t s = 0; s < 200; ++s)
    for (const auto& pat : gen_patterns(2, s)) EXPECT_EQ(pat.missing_count(), 1u);
}

TEST(PatternTest, TwentyColumnsStayInRange) {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto pats = gen_patterns(20, s);
    EXPECT_GE(pats.size(), 1u);
    EXPECT_LE(pats.size(), 20u);
    for (const auto& pat : pats) {
      EXPECT_EQ(pat.width(), 20u);
      EXPECT_GE(pat.missing_count(), 1u);
      EXPECT_LE(pat.missing_count(), 10u);
    }
  }
}

TEST(PatternTest, MissingCountIsUniform) {
  std::vector<double> counts(5, 0.0);
  std::size_t total = 0;
  for (std::uint64_t s = 0; total < 100000; ++s) {
    for (const auto& pat : gen_patterns(10, s)) {
      counts[pat.missing_count() - 1] += 1.0;
      ++total;
    }
  }
  const double expected = static_cast<double>(total) / 5.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 0.999 quantile of chi-square with 4 degrees of freedom.
  EXPECT_LT(chi2, 18.467);
}

TEST(PatternTest, PatternCountIsUniform) {
  std::vector<double> counts(6, 0.0);
  const int draws = 60000;
  for (int s = 0; s < draws; ++s) counts[gen_patterns(6, static_cast<std::uint64_t>(s)).size() - 1] += 1.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - draws / 6.0) * (c - draws / 6.0) / (draws / 6.0);
  EXPECT_LT(chi2, 20.515);  // 0.999 quantile, 5 degrees of freedom
}

TEST(PatternTest, RejectsNarrowFrames) { EXPECT_THROW(gen_patterns(1, 0), InvalidConfiguration); }

TEST(AmputeTest, ExactQuotaBothMechanisms) {
  const auto frame = complete_frame(1000, 10, 0.5, 4);
  for (auto mech : {Mechanism::MCAR, Mechanism::MAR}) {
    AmputeConfig cfg;
    cfg.patterns = gen_patterns(10, 77);
    cfg.mechanism = mech;
    const auto out = ampute(frame, cfg, 123);
    const auto inc = incomplete_rows(out);
    EXPECT_EQ(std::count(inc.begin(), inc.end(), 1), 900) << to_string(mech);
    // Outcome untouched, observed cells unchanged.
    EXPECT_EQ(out.column(0), frame.column(0));
    for (auto j : out.predictor_indices())
      for (std::size_t i = 0; i < out.n_rows(); ++i)
        if (out.column(j).observed(i)) EXPECT_EQ(out.column(j).value(i), frame.column(j).value(i));
  }
}

TEST(AmputeTest, EveryIncompleteRowFollowsAConfiguredPattern) {
  const auto train = complete_frame(400, 12, 0.3, 1);
  const auto valid = complete_frame(600, 12, 0.3, 2);
  AmputeConfig cfg;
  cfg.patterns = gen_patterns(12, 5);
  cfg.mechanism = Mechanism::MAR;
  const std::set<std::vector<std::uint8_t>> allowed = [&] {
    std::set<std::vector<std::uint8_t>> s;
    for (const auto& p : cfg.patterns) s.insert(p.mask);
    return s;
  }();
  for (const Frame* f : {&train, &valid}) {
    const auto out = ampute(*f, cfg, 9);
    const auto inc = incomplete_rows(out);
    for (std::size_t i = 0; i < out.n_rows(); ++i)
      if (inc[i]) EXPECT_TRUE(allowed.count(row_mask(out, i).mask));
  }
}

TEST(AmputeTest, VanishingProportionIsIdentity) {
  const auto frame = complete_frame(100, 4, 0.0, 3);
  AmputeConfig cfg;
  cfg.patterns = gen_patterns(4, 1);
  cfg.prop_incomplete = 1e-9;
  for (auto mech : {Mechanism::MCAR, Mechanism::MAR}) {
    cfg.mechanism = mech;
    EXPECT_EQ(ampute(frame, cfg, 1), frame);
  }
}

TEST(AmputeTest, DeterministicInSeed) {
  const auto frame = complete_frame(300, 8, 0.5, 3);
  AmputeConfig cfg;
  cfg.patterns = gen_patterns(8, 2);
  cfg.mechanism = Mechanism::MAR;
  EXPECT_EQ(ampute(frame, cfg, 10), ampute(frame, cfg, 10));
  EXPECT_NE(ampute(frame, cfg, 10), ampute(frame, cfg, 11));
}

TEST(AmputeTest, Errors) {
  auto frame = complete_frame(20, 4, 0.0, 3);
  AmputeConfig cfg;
  cfg.patterns = gen_patterns(6, 1);
  EXPECT_THROW(ampute(frame, cfg, 1), SchemaError);
  cfg.patterns = gen_patterns(4, 1);
  frame.mutable_column(2).set_missing(0);
  EXPECT_THROW(ampute(frame, cfg, 1), PreconditionError);
  cfg.patterns = {MdPattern{{1, 1, 1, 0}}};
  EXPECT_THROW(cfg.validate(), InvalidConfiguration);
  cfg.patterns = {MdPattern{{1, 0, 0, 0}}};
  cfg.prop_incomplete = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidConfiguration);
}

// Column 0 is lost; under MAR the selection score is the retained column 1,
// which is correlated with column 0, so the surviving column-0 values are a
// biased subsample. Under MCAR they are not.
TEST(AmputeTest, MarSelectionShiftsObservedMean) {
  const std::size_t n = 10000;
  const auto frame = complete_frame(n, 2, 0.75, 21);
  AmputeConfig cfg;
  cfg.patterns = {MdPattern{{1, 0}}};
  cfg.prop_incomplete = 0.5;
  double full = 0.0;
  for (std::size_t i = 0; i < n; ++i) full += frame.column(1).value(i) / n;

  auto gap_in_se = [&](Mechanism mech) {
    cfg.mechanism = mech;
    const auto out = ampute(frame, cfg, 5);
    const auto& c = out.column(1);
    double sum = 0.0, sq = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (c.missing(i)) continue;
      sum += c.value(i);
      sq += c.value(i) * c.value(i);
      ++m;
    }
    const double mean = sum / m;
    const double var = sq / m - mean * mean;
    // Finite-population correction: the observed half is drawn from the n rows.
    const double se = std::sqrt(var / m * (1.0 - static_cast<double>(m) / n));
    return std::abs(mean - full) / se;
  };
  EXPECT_LT(gap_in_se(Mechanism::MCAR), 3.0);
  EXPECT_GT(gap_in_se(Mechanism::MAR), 3.0);
}

TEST(AmputeTest, CellMissingnessPlausibilityBand) {
  const std::size_t n = 200, p = 20;
  const auto frame = complete_frame(n, p, 0.75, 8);
  double pooled = 0.0;
  int in_band = 0;
  const int configs = 1000;
  for (int c = 0; c < configs; ++c) {
    AmputeConfig cfg;
    cfg.patterns = gen_patterns(p, 1000 + static_cast<std::uint64_t>(c));
    cfg.mechanism = c % 2 ? Mechanism::MAR : Mechanism::MCAR;
    const auto out = ampute(frame, cfg, static_cast<std::uint64_t>(c));
    const double frac = static_cast<double>(out.missing_cells()) / static_cast<double>(n * p);
    pooled += frac / configs;
    if (frac >= 0.10 && frac <= 0.60) ++in_band;
  }
  EXPECT_GE(pooled, 0.10);
  EXPECT_LE(pooled, 0.60);
  // A handful of configurations with one or two tiny patterns fall below 10%.
  EXPECT_GE(in_band, 950);
}

TEST(AmputeTest, McarIndicatorIndependentOfData) {
  const std::size_t n = 500, p = 6;
  const int reps = 100;
  std::vector<double> z_sum(p + 1, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto frame = complete_frame(n, p, 0.5, 300 + static_cast<std::uint64_t>(r));
    AmputeConfig cfg;
    cfg.patterns = gen_patterns(p, static_cast<std::uint64_t>(r));
    cfg.mechanism = Mechanism::MCAR;
    cfg.prop_incomplete = 0.5;
    const auto inc = incomplete_rows(ampute(frame, cfg, static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd x(n, p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < n; ++i)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = frame.column(1 + j).value(i);
    const auto fit = testing::logistic_regression(x, inc);
    ASSERT_TRUE(fit.converged);
    for (std::size_t j = 1; j <= p; ++j) z_sum[j] += fit.z(static_cast<Eigen::Index>(j));
  }
  // Stouffer combination: under independence each sum / sqrt(reps) is N(0, 1).
  for (std::size_t j = 1; j <= p; ++j) EXPECT_LT(std::abs(z_sum[j] / std::sqrt(reps)), 3.29);
}

TEST(AmputeTest, MarIndicatorDependsOnData) {
  const std::size_t n = 2000, p = 2;
  const auto frame = complete_frame(n, p, 0.0, 31);
  AmputeConfig cfg;
  cfg.patterns = {MdPattern{{1, 0}}};
  cfg.mechanism = Mechanism::MAR;
  cfg.prop_incomplete = 0.5;
  const auto inc = incomplete_rows(ampute(frame, cfg, 2));
  Eigen::MatrixXd x(n, 1);
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), 0) = frame.column(2).value(i);
  EXPECT_GT(std::abs(testing::logistic_regression(x, inc).z(1)), 10.0);
}

TEST(MechanismTest, ParseRoundTrip) {
  EXPECT_EQ(parse_mechanism("MCAR"), Mechanism::MCAR);
  EXPECT_EQ(parse_mechanism(to_string(Mechanism::MAR)), Mechanism::MAR);
  EXPECT_THROW(parse_mechanism("MNAR"), InvalidConfiguration);
}

}  // namespace
}  // namespace mdcv
