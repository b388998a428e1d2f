#include "mdcv/cvengine.hpp"

#include <algorithm>
#include <chrono>

#include "mdcv/error.hpp"
#include "mdcv/impute.hpp"
#include "mdcv/metrics.hpp"
#include "mdcv/random.hpp"

namespace mdcv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> normalized(std::span<const int> ks) {
  if (ks.empty()) throw InvalidConfiguration("k grid must be nonempty");
  std::vector<int> out(ks.begin(), ks.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.front() < 1) throw InvalidConfiguration("neighbour count k must be >= 1");
  return out;
}

void check_plan(const Frame& train, const FoldPlan& plan) {
  if (plan.size() != train.n_rows())
    throw SchemaError("fold plan length differs from training row count");
  if (!train.outcome_index()) throw SchemaError("training frame has no outcome column");
}

KnnImputer fit_observed(const Frame& donors, const EngineOptions& options) {
  if (options.hooks.on_imputer_fit) options.hooks.on_imputer_fit(donors);
  return fit_knn(donors, 1);
}

FittedModel fit_observed_model(const Frame& train, std::uint64_t seed, const EngineOptions& options) {
  if (options.hooks.on_model_fit) options.hooks.on_model_fit(train);
  return options.learner(train, seed);
}

// Scores pooled held-out predictions for every k.
void score(const Frame& train, const std::vector<std::vector<double>>& pooled, CvEstimates& out) {
  const auto y = train.outcome();
  out.r2.resize(pooled.size());
  out.rmse.resize(pooled.size());
  for (std::size_t g = 0; g < pooled.size(); ++g) {
    out.r2[g] = r_squared(y, pooled[g]);
    out.rmse[g] = rmse(y, pooled[g]);
  }
}

void place(std::vector<double>& pooled, const std::vector<std::size_t>& rows,
           const std::vector<double>& pred) {
  for (std::size_t i = 0; i < rows.size(); ++i) pooled[rows[i]] = pred[i];
}

}  // namespace

std::string_view to_string(WorkflowKind w) {
  return w == WorkflowKind::DuringCv ? "during" : "before";
}

std::uint64_t fold_model_seed(std::uint64_t seed, int fold) {
  return mix_seed(seed, 0x1000 + static_cast<std::uint64_t>(fold));
}
std::uint64_t final_model_seed(std::uint64_t seed) { return mix_seed(seed, 0xF00D); }
std::uint64_t plan_seed(std::uint64_t seed) { return mix_seed(seed, 0xF01D); }

CvEstimates estimate_during(const Frame& train, std::span<const int> ks_in, const FoldPlan& plan,
                            std::uint64_t seed, const EngineOptions& options) {
  check_plan(train, plan);
  CvEstimates out;
  out.workflow = WorkflowKind::DuringCv;
  out.ks = normalized(ks_in);
  const auto n = train.n_rows();
  std::vector<std::vector<double>> pooled(out.ks.size(), std::vector<double>(n, 0.0));

  for (int f = 0; f < plan.v; ++f) {
    const auto held = plan.rows_in(f);
    auto [analysis, assessment] = split(train, plan, f);

    auto t0 = Clock::now();
    const KnnImputer imputer = fit_observed(analysis, options);
    auto analysis_grid = impute_grid(imputer, imputer.donors(), out.ks);
    auto assessment_grid = impute_grid(imputer, assessment, out.ks);
    out.impute_seconds += seconds_since(t0);
    ++out.imputer_fits;

    t0 = Clock::now();
    for (std::size_t g = 0; g < out.ks.size(); ++g) {
      const int k = out.ks[g];
      const auto model = fit_observed_model(analysis_grid.at(k), fold_model_seed(seed, f), options);
      place(pooled[g], held, model.predict(assessment_grid.at(k)));
    }
    out.model_seconds += seconds_since(t0);
  }
  score(train, pooled, out);
  return out;
}

CvEstimates estimate_before(const Frame& train, std::span<const int> ks_in, const FoldPlan& plan,
                            std::uint64_t seed, const EngineOptions& options) {
  check_plan(train, plan);
  CvEstimates out;
  out.workflow = WorkflowKind::BeforeCv;
  out.ks = normalized(ks_in);
  const auto n = train.n_rows();
  std::vector<std::vector<double>> pooled(out.ks.size(), std::vector<double>(n, 0.0));

  auto t0 = Clock::now();
  const KnnImputer imputer = fit_observed(train, options);
  const auto grid = impute_grid(imputer, imputer.donors(), out.ks);
  out.impute_seconds += seconds_since(t0);
  ++out.imputer_fits;

  t0 = Clock::now();
  for (std::size_t g = 0; g < out.ks.size(); ++g) {
    const Frame& imputed = grid.at(out.ks[g]);
    for (int f = 0; f < plan.v; ++f) {
      const auto held = plan.rows_in(f);
      auto [analysis, assessment] = split(imputed, plan, f);
      const auto model = fit_observed_model(analysis, fold_model_seed(seed, f), options);
      place(pooled[g], held, model.predict(assessment));
    }
  }
  out.model_seconds += seconds_since(t0);
  score(train, pooled, out);
  return out;
}

CvEstimates estimate(WorkflowKind workflow, const Frame& train, std::span<const int> ks,
                     const FoldPlan& plan, std::uint64_t seed, const EngineOptions& options) {
  return workflow == WorkflowKind::DuringCv ? estimate_during(train, ks, plan, seed, options)
                                            : estimate_before(train, ks, plan, seed, options);
}

int choose_k(const CvEstimates& estimates) {
  if (estimates.ks.empty() || estimates.rmse.size() != estimates.ks.size())
    throw InvalidConfiguration("estimates are empty or inconsistent");
  const auto best = std::min_element(estimates.rmse.begin(), estimates.rmse.end());
  return estimates.ks[static_cast<std::size_t>(best - estimates.rmse.begin())];
}

FinalCurve finalize_curve(const Frame& train, const Frame& test, std::span<const int> ks_in,
                          std::uint64_t seed, const EngineOptions& options) {
  if (!train.same_schema(test)) throw SchemaError("test frame schema differs from training frame");
  FinalCurve curve;
  curve.ks = normalized(ks_in);
  const auto y_test = test.outcome();

  auto t0 = Clock::now();
  const KnnImputer imputer = fit_observed(train, options);
  const auto train_grid = impute_grid(imputer, imputer.donors(), curve.ks);
  const auto test_grid = impute_grid(imputer, test, curve.ks);
  curve.impute_seconds = seconds_since(t0);

  t0 = Clock::now();
  for (int k : curve.ks) {
    const auto model = fit_observed_model(train_grid.at(k), final_model_seed(seed), options);
    curve.r2.push_back(r_squared(y_test, model.predict(test_grid.at(k))));
    curve.lambdas.push_back(model.lambda);
  }
  curve.model_seconds = seconds_since(t0);
  return curve;
}

FinalReport tune_and_finalize(const Frame& train, const Frame& test, std::span<const int> ks,
                              WorkflowKind workflow, int v, std::uint64_t seed,
                              const EngineOptions& options) {
  const auto pseed = plan_seed(seed);
  auto report = tune_and_finalize(train, test, ks, workflow, make_folds(train.n_rows(), v, pseed),
                                  seed, options);
  report.tune.plan_seed = pseed;
  return report;
}

FinalReport tune_and_finalize(const Frame& train, const Frame& test, std::span<const int> ks,
                              WorkflowKind workflow, const FoldPlan& plan, std::uint64_t seed,
                              const EngineOptions& options) {
  FinalReport report;
  report.workflow = workflow;
  report.tune.estimates = estimate(workflow, train, ks, plan, seed, options);
  report.tune.chosen_k = choose_k(report.tune.estimates);
  report.chosen_k = report.tune.chosen_k;
  report.curve = finalize_curve(train, test, ks, seed, options);
  const auto& cks = report.curve.ks;
  const auto at = static_cast<std::size_t>(std::find(cks.begin(), cks.end(), report.chosen_k) - cks.begin());
  report.external_r2 = report.curve.r2.at(at);
  report.chosen_lambda = report.curve.lambdas.at(at);
  return report;
}

}  // namespace mdcv
