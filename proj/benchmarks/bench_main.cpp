// Microbenchmarks for the hot paths of one replicate: the kNN imputation
// grid, the lasso path with inner CV, and a full workflow estimate.

#include <benchmark/benchmark.h>

#include <numeric>

#include "mdcv/ampute.hpp"
#include "mdcv/cvengine.hpp"
#include "mdcv/design.hpp"
#include "mdcv/impute.hpp"
#include "mdcv/lasso.hpp"
#include "mdcv/simgen.hpp"

namespace {

mdcv::Frame amputed_train(std::size_t n, std::size_t n_junk, std::uint64_t seed) {
  mdcv::GenConfig g;
  g.n_train = n;
  g.n_valid = 10;
  g.n_junk = n_junk;
  auto data = mdcv::generate(g, seed);
  mdcv::AmputeConfig a;
  a.patterns = mdcv::gen_patterns(data.train.predictor_indices().size(), seed + 1);
  return mdcv::ampute(data.train, a, seed + 2);
}

std::vector<int> grid(int max_k) {
  std::vector<int> ks(static_cast<std::size_t>(max_k));
  std::iota(ks.begin(), ks.end(), 1);
  return ks;
}

void BM_ImputeGridSelf(benchmark::State& state) {
  const auto train = amputed_train(static_cast<std::size_t>(state.range(0)), 10, 1);
  const auto ks = grid(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mdcv::impute_grid(train, ks));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ImputeGridSelf)->Args({100, 15})->Args({500, 15})->Args({1000, 15})->Args({500, 1})
    ->Unit(benchmark::kMillisecond);

void BM_ImputeSingleK(benchmark::State& state) {
  const auto train = amputed_train(static_cast<std::size_t>(state.range(0)), 10, 1);
  const auto imputer = mdcv::fit_knn(train, 5);
  for (auto _ : state) benchmark::DoNotOptimize(mdcv::transform_self(imputer));
}
BENCHMARK(BM_ImputeSingleK)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_CvLasso(benchmark::State& state) {
  const auto train = amputed_train(static_cast<std::size_t>(state.range(0)), 10, 3);
  const auto filled = mdcv::SimpleImputer::fit(train).transform(train);
  const auto x = mdcv::design_matrix(filled);
  const auto y = filled.outcome();
  for (auto _ : state) benchmark::DoNotOptimize(mdcv::cv_lasso(x, y, 10, 7));
}
BENCHMARK(BM_CvLasso)->Arg(90)->Arg(450)->Unit(benchmark::kMillisecond);

void BM_EstimateWorkflow(benchmark::State& state) {
  const auto train = amputed_train(200, 10, 5);
  const auto plan = mdcv::make_folds(train.n_rows(), 10, 9);
  const auto ks = grid(5);
  const auto workflow = state.range(0) == 0 ? mdcv::WorkflowKind::DuringCv : mdcv::WorkflowKind::BeforeCv;
  for (auto _ : state) benchmark::DoNotOptimize(mdcv::estimate(workflow, train, ks, plan, 11));
  state.SetLabel(std::string(mdcv::to_string(workflow)));
}
BENCHMARK(BM_EstimateWorkflow)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
