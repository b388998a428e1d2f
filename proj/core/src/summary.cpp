#include "mdcv/summary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "mdcv/error.hpp"

namespace mdcv {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sum of squared deviations about the mean.
double centered_ss(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s;
}

struct Pool {
  std::vector<const ReplicateRecord*> complete;
  std::size_t failed = 0;
};

SettingSummary summarize_pool(const SettingKey& key, bool overall, const Pool& pool) {
  SettingSummary row;
  row.key = key;
  row.overall = overall;
  row.replicates = pool.complete.size();
  row.failed = pool.failed;

  std::vector<double> truth, during, before, diff;
  std::vector<double> truth_cd, est_cd, truth_cb, est_cb, down_d, down_b, base, ratio, imp_d, imp_b;
  bool all_baseline = true;
  for (const auto* r : pool.complete) {
    for (std::size_t g = 0; g < r->ks.size(); ++g) {
      truth.push_back(r->truth[g]);
      during.push_back(r->during[g]);
      before.push_back(r->before[g]);
      diff.push_back(std::abs(r->during[g] - r->before[g]));
    }
    truth_cd.push_back(r->truth_at(r->chosen_k_during));
    est_cd.push_back(r->during_at(r->chosen_k_during));
    truth_cb.push_back(r->truth_at(r->chosen_k_before));
    est_cb.push_back(r->before_at(r->chosen_k_before));
    down_d.push_back(r->downstream_during);
    down_b.push_back(r->downstream_before);
    if (r->baseline) base.push_back(*r->baseline);
    else all_baseline = false;
    imp_d.push_back(r->timing.impute_during);
    imp_b.push_back(r->timing.impute_before);
    if (r->timing.impute_before > 0.0) ratio.push_back(r->timing.impute_during / r->timing.impute_before);
  }
  row.truth = mean_sd(truth);
  row.abs_difference = mean_sd(diff);
  row.during.per_k = error_stats(during, truth);
  row.before.per_k = error_stats(before, truth);
  row.during.chosen = error_stats(est_cd, truth_cd);
  row.before.chosen = error_stats(est_cb, truth_cb);
  row.during.downstream = mean_sd(down_d);
  row.before.downstream = mean_sd(down_b);
  if (all_baseline && base.size() >= 2) row.baseline = mean_sd(base);
  row.impute_during_seconds = mean_sd(imp_d);
  row.impute_before_seconds = mean_sd(imp_b);
  if (ratio.size() >= 2) {
    row.timing_ratio = mean_sd(ratio);
    row.timing_quantiles = quantiles(ratio);
  }
  return row;
}

}  // namespace

ErrorStats error_stats(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw SchemaError("estimate and truth lengths differ");
  if (estimate.size() < 2) throw PreconditionError("at least two estimate/truth pairs are required");
  const std::size_t n = estimate.size();
  std::vector<double> err(n);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = estimate[i] - truth[i];
    sq += err[i] * err[i];
  }
  ErrorStats s;
  s.count = n;
  s.bias = mean_of(err);
  const double ss = centered_ss(err, s.bias);
  s.var_error_pop = ss / static_cast<double>(n);
  s.sd_error = std::sqrt(ss / static_cast<double>(n - 1));
  s.rmse = std::sqrt(sq / static_cast<double>(n));
  s.mean_estimate = mean_of(estimate);
  s.sd_estimate = std::sqrt(centered_ss(estimate, s.mean_estimate) / static_cast<double>(n - 1));
  s.mean_truth = mean_of(truth);
  return s;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  out.count = values.size();
  if (values.empty()) return out;
  out.mean = mean_of(values);
  out.sd = values.size() > 1
               ? std::sqrt(centered_ss(values, out.mean) / static_cast<double>(values.size() - 1))
               : 0.0;
  return out;
}

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("quantiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

std::string SettingSummary::label() const {
  return overall ? key.scenario + "_" + key.mechanism + "_" + key.model + "_overall" : key.id();
}

MetricSummary summarize(const RecordSet& records) {
  MetricSummary out;
  using Group = std::tuple<std::string, std::string, std::string>;
  std::map<Group, Pool> overall;
  std::map<Group, std::vector<SettingSummary>> by_group;

  for (const auto& [key, group] : records) {
    Pool pool;
    for (const auto& r : group) {
      if (r.complete()) pool.complete.push_back(&r);
      else ++pool.failed;
    }
    const Group g{key.scenario, key.mechanism, key.model};
    auto& agg = overall[g];
    agg.complete.insert(agg.complete.end(), pool.complete.begin(), pool.complete.end());
    agg.failed += pool.failed;
    if (pool.complete.size() < 2) {
      out.warnings.push_back("omitting " + key.id() + ": " + std::to_string(pool.complete.size()) +
                             " complete replicate(s), at least 2 required");
      continue;
    }
    by_group[g].push_back(summarize_pool(key, false, pool));
  }

  for (auto& [g, pool] : overall) {
    auto& rows = by_group[g];
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    const SettingKey key{std::get<0>(g), std::get<1>(g), 0, 0, std::get<2>(g)};
    if (pool.complete.size() < 2) {
      out.warnings.push_back("omitting overall row " + key.scenario + "_" + key.mechanism + "_" + key.model);
      continue;
    }
    out.rows.push_back(summarize_pool(key, true, pool));
  }
  return out;
}

}  // namespace mdcv
