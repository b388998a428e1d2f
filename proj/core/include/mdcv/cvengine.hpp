#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdcv/frame.hpp"
#include "mdcv/learners.hpp"

namespace mdcv {

/// DuringCv fits the imputer inside every fold on the analysis rows only
/// and imputes the assessment rows from them. BeforeCv imputes the whole
/// training set once (every training row is a donor) and then cuts folds.
enum class WorkflowKind { DuringCv, BeforeCv };

std::string_view to_string(WorkflowKind w);

/// Observation points for tests and instrumentation.
struct EngineHooks {
  std::function<void(const Frame& donors)> on_imputer_fit;
  std::function<void(const Frame& train)> on_model_fit;
};

struct EngineOptions {
  Learner learner = lasso_learner();
  EngineHooks hooks;
};

/// Cross-validated external R^2 and RMSE for every k, from held-out
/// predictions pooled across folds.
struct CvEstimates {
  WorkflowKind workflow = WorkflowKind::DuringCv;
  std::vector<int> ks;  // ascending
  std::vector<double> r2;
  std::vector<double> rmse;
  double impute_seconds = 0.0;
  double model_seconds = 0.0;
  std::size_t imputer_fits = 0;
};

struct TuneResult {
  CvEstimates estimates;
  int chosen_k = 0;
  std::uint64_t plan_seed = 0;
};

/// True external performance of the finalized pipeline for every k: impute
/// the full training set at k, fit the learner on it, impute the test set
/// from the training donors, score.
struct FinalCurve {
  std::vector<int> ks;
  std::vector<double> r2;
  std::vector<std::optional<double>> lambdas;
  double impute_seconds = 0.0;
  double model_seconds = 0.0;
};

struct FinalReport {
  WorkflowKind workflow = WorkflowKind::DuringCv;
  int chosen_k = 0;
  std::optional<double> chosen_lambda;
  double external_r2 = 0.0;
  FinalCurve curve;
  TuneResult tune;
};

CvEstimates estimate_during(const Frame& train, std::span<const int> ks, const FoldPlan& plan,
                            std::uint64_t seed, const EngineOptions& options = {});

CvEstimates estimate_before(const Frame& train, std::span<const int> ks, const FoldPlan& plan,
                            std::uint64_t seed, const EngineOptions& options = {});

CvEstimates estimate(WorkflowKind workflow, const Frame& train, std::span<const int> ks,
                     const FoldPlan& plan, std::uint64_t seed, const EngineOptions& options = {});

/// Smallest k attaining the minimum estimated RMSE.
int choose_k(const CvEstimates& estimates);

FinalCurve finalize_curve(const Frame& train, const Frame& test, std::span<const int> ks,
                          std::uint64_t seed, const EngineOptions& options = {});

/// Full pipeline: tune k with the chosen workflow, then finalize on the full
/// training set and validate on `test` (imputed from training donors). The
/// fold plan is ungrouped with v folds.
FinalReport tune_and_finalize(const Frame& train, const Frame& test, std::span<const int> ks,
                              WorkflowKind workflow, int v, std::uint64_t seed,
                              const EngineOptions& options = {});

/// Same, with a caller-supplied (possibly grouped) plan.
FinalReport tune_and_finalize(const Frame& train, const Frame& test, std::span<const int> ks,
                              WorkflowKind workflow, const FoldPlan& plan, std::uint64_t seed,
                              const EngineOptions& options = {});

/// Seed streams shared by both workflows so a fixed seed yields the same
/// inner model fits.
std::uint64_t fold_model_seed(std::uint64_t seed, int fold);
std::uint64_t final_model_seed(std::uint64_t seed);
std::uint64_t plan_seed(std::uint64_t seed);

}  // namespace mdcv
