#include "mdcv/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdcv/error.hpp"
#include "mdcv/random.hpp"

namespace mdcv {

double RegressionTree::predict(std::span<const double> row) const {
  std::int32_t at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& node = nodes[static_cast<std::size_t>(at)];
    const double v = row[static_cast<std::size_t>(node.feature)];
    const bool go_left = node.level >= 0 ? static_cast<std::int32_t>(v) == node.level
                                         : v <= node.threshold;
    at = go_left ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(at)].value;
}

namespace {

struct Split {
  int feature = -1;
  std::int32_t level = -1;
  double threshold = 0.0;
  double score = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const std::vector<std::vector<double>>& cols, const std::vector<ColumnKind>& kinds,
             const std::vector<std::size_t>& n_levels, std::span<const double> y, int mtry,
             int min_leaf)
      : cols_(cols), kinds_(kinds), n_levels_(n_levels), y_(y), mtry_(mtry),
        min_leaf_(static_cast<std::size_t>(min_leaf)) {}

  RegressionTree grow(std::uint64_t seed) {
    Rng rng(seed);
    const auto n = y_.size();
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));

    RegressionTree tree;
    struct Work { std::size_t begin, end; std::int32_t node; };
    std::vector<Work> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, n, 0});
    std::vector<std::size_t> features(cols_.size());

    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      const std::size_t count = w.end - w.begin;
      double sum = 0.0;
      double lo = y_[idx[w.begin]], hi = lo;
      for (std::size_t i = w.begin; i < w.end; ++i) {
        const double v = y_[idx[i]];
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      tree.nodes[static_cast<std::size_t>(w.node)].value = sum / static_cast<double>(count);
      if (count < 2 * min_leaf_ || lo == hi) continue;

      std::iota(features.begin(), features.end(), std::size_t{0});
      const auto p = features.size();
      const auto tries = std::min<std::size_t>(static_cast<std::size_t>(mtry_), p);
      for (std::size_t i = 0; i < tries; ++i)
        std::swap(features[i], features[i + static_cast<std::size_t>(rng.below(p - i))]);

      Split best;
      best.score = sum * sum / static_cast<double>(count);
      const double base = best.score;
      for (std::size_t t = 0; t < tries; ++t)
        evaluate(static_cast<int>(features[t]), idx, w.begin, w.end, sum, best);
      if (best.feature < 0 || !(best.score > base + 1e-12 * std::abs(base))) continue;

      const auto& col = cols_[static_cast<std::size_t>(best.feature)];
      auto mid = std::stable_partition(
          idx.begin() + static_cast<std::ptrdiff_t>(w.begin),
          idx.begin() + static_cast<std::ptrdiff_t>(w.end), [&](std::size_t r) {
            return best.level >= 0 ? static_cast<std::int32_t>(col[r]) == best.level
                                   : col[r] <= best.threshold;
          });
      const auto split_at = static_cast<std::size_t>(mid - idx.begin());
      const auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(w.node)];
      node.feature = best.feature;
      node.level = best.level;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({split_at, w.end, left + 1});
      stack.push_back({w.begin, split_at, left});
    }
    return tree;
  }

 private:
  void evaluate(int feature, const std::vector<std::size_t>& idx, std::size_t begin,
                std::size_t end, double total, Split& best) {
    const auto& col = cols_[static_cast<std::size_t>(feature)];
    const std::size_t count = end - begin;
    if (kinds_[static_cast<std::size_t>(feature)] == ColumnKind::numeric) {
      pairs_.clear();
      for (std::size_t i = begin; i < end; ++i) pairs_.emplace_back(col[idx[i]], y_[idx[i]]);
      std::sort(pairs_.begin(), pairs_.end());
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < count; ++i) {
        left_sum += pairs_[i].second;
        const std::size_t nl = i + 1, nr = count - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        if (!(pairs_[i].first < pairs_[i + 1].first)) continue;
        const double right_sum = total - left_sum;
        const double score = left_sum * left_sum / static_cast<double>(nl) +
                             right_sum * right_sum / static_cast<double>(nr);
        if (score > best.score) {
          double t = 0.5 * (pairs_[i].first + pairs_[i + 1].first);
          if (!(t < pairs_[i + 1].first)) t = pairs_[i].first;
          best = {feature, -1, t, score};
        }
      }
    } else {
      const auto L = n_levels_[static_cast<std::size_t>(feature)];
      level_sum_.assign(L, 0.0);
      level_count_.assign(L, 0);
      for (std::size_t i = begin; i < end; ++i) {
        const auto l = static_cast<std::size_t>(col[idx[i]]);
        level_sum_[l] += y_[idx[i]];
        ++level_count_[l];
      }
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t nl = level_count_[l], nr = count - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double right_sum = total - level_sum_[l];
        const double score = level_sum_[l] * level_sum_[l] / static_cast<double>(nl) +
                             right_sum * right_sum / static_cast<double>(nr);
        if (score > best.score) best = {feature, static_cast<std::int32_t>(l), 0.0, score};
      }
    }
  }

  const std::vector<std::vector<double>>& cols_;
  const std::vector<ColumnKind>& kinds_;
  const std::vector<std::size_t>& n_levels_;
  std::span<const double> y_;
  int mtry_;
  std::size_t min_leaf_;
  std::vector<std::pair<double, double>> pairs_;
  std::vector<double> level_sum_;
  std::vector<std::size_t> level_count_;
};

}  // namespace

ForestFit forest_fit(const Frame& predictors, std::span<const double> y, const ForestConfig& config) {
  if (predictors.n_rows() == 0 || y.empty())
    throw InvalidConfiguration("forest needs a nonempty training set");
  if (predictors.n_rows() != y.size()) throw SchemaError("predictor rows differ from outcome length");
  if (config.n_trees < 1) throw InvalidConfiguration("n_trees must be >= 1");
  if (config.min_leaf < 1) throw InvalidConfiguration("min_leaf must be >= 1");
  const auto& pred = predictors.predictor_indices();
  if (pred.empty()) throw InvalidConfiguration("forest needs at least one predictor");
  for (double v : y)
    if (!std::isfinite(v)) throw NumericError("outcome has non-finite entries");

  ForestFit fit;
  std::vector<std::vector<double>> cols;
  std::vector<std::size_t> n_levels;
  for (auto j : pred) {
    const auto& col = predictors.column(j);
    if (col.missing_count() > 0)
      throw PreconditionError("column '" + col.name() + "' has missing cells; impute before modeling");
    fit.features.push_back(col.name());
    fit.kinds.push_back(col.kind());
    fit.levels.push_back(col.levels());
    n_levels.push_back(col.levels().size());
    std::vector<double> cells(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) cells[i] = col.cell(i);
    cols.push_back(std::move(cells));
  }
  const auto p = static_cast<int>(pred.size());
  fit.mtry = config.mtry > 0 ? std::min(config.mtry, p) : std::max(1, (p + 2) / 3);
  fit.min_leaf = config.min_leaf;
  fit.n_trees = config.n_trees;

  TreeGrower grower(cols, fit.kinds, n_levels, y, fit.mtry, fit.min_leaf);
  fit.trees.reserve(static_cast<std::size_t>(config.n_trees));
  for (int t = 0; t < config.n_trees; ++t) {
    const auto seed = mix_seed(config.seed, static_cast<std::uint64_t>(t));
    fit.tree_seeds.push_back(seed);
    fit.trees.push_back(grower.grow(seed));
  }
  return fit;
}

std::vector<double> forest_predict(const ForestFit& fit, const Frame& frame) {
  std::vector<const Column*> cols;
  for (std::size_t f = 0; f < fit.features.size(); ++f) {
    const auto& col = frame.column(fit.features[f]);
    if (col.kind() != fit.kinds[f] || col.levels() != fit.levels[f])
      throw SchemaError("column '" + col.name() + "' differs from the training schema");
    if (col.missing_count() > 0)
      throw PreconditionError("column '" + col.name() + "' has missing cells; impute before predicting");
    cols.push_back(&col);
  }
  std::vector<double> out(frame.n_rows());
  std::vector<double> row(cols.size());
  for (std::size_t i = 0; i < frame.n_rows(); ++i) {
    for (std::size_t f = 0; f < cols.size(); ++f) row[f] = cols[f]->cell(i);
    double sum = 0.0;
    for (const auto& tree : fit.trees) sum += tree.predict(row);
    out[i] = sum / static_cast<double>(fit.trees.size());
  }
  return out;
}

}  // namespace mdcv
