#include "mdcv/ampute.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mdcv/error.hpp"
#include "mdcv/random.hpp"

namespace mdcv {

std::string_view to_string(Mechanism m) { return m == Mechanism::MCAR ? "MCAR" : "MAR"; }

Mechanism parse_mechanism(std::string_view text) {
  if (text == "MCAR") return Mechanism::MCAR;
  if (text == "MAR") return Mechanism::MAR;
  throw InvalidConfiguration("unknown missing-data mechanism '" + std::string(text) + "'");
}

std::size_t MdPattern::missing_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

void MdPattern::validate() const {
  const auto m = missing_count();
  if (m < 1 || m > mask.size() / 2)
    throw InvalidConfiguration("pattern sets " + std::to_string(m) + " of " +
                               std::to_string(mask.size()) +
                               " columns missing; allowed range is 1..floor(p/2)");
}

void AmputeConfig::validate() const {
  if (patterns.empty()) throw InvalidConfiguration("at least one missing-data pattern is required");
  if (!(prop_incomplete > 0.0 && prop_incomplete <= 1.0))
    throw InvalidConfiguration("prop_incomplete must lie in (0, 1]");
  const auto p = patterns.front().width();
  for (const auto& pat : patterns) {
    if (pat.width() != p) throw SchemaError("patterns have differing widths");
    pat.validate();
  }
  if (!mar_weights.empty()) {
    if (mar_weights.size() != patterns.size())
      throw InvalidConfiguration("need one MAR weight vector per pattern");
    for (const auto& w : mar_weights)
      if (w.size() != p) throw SchemaError("MAR weight vector width differs from pattern width");
  }
}

std::vector<MdPattern> gen_patterns(std::size_t p, std::uint64_t seed) {
  if (p < 2) throw InvalidConfiguration("pattern generation needs p >= 2");
  Rng rng(seed);
  const auto count = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(p)));
  std::vector<MdPattern> patterns;
  patterns.reserve(count);
  std::vector<std::size_t> cols(p);
  for (std::size_t k = 0; k < count; ++k) {
    const auto m = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(p / 2)));
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    // Partial Fisher-Yates: the first m slots are a uniform m-subset.
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(p - i));
      std::swap(cols[i], cols[j]);
    }
    MdPattern pat;
    pat.mask.assign(p, 0);
    for (std::size_t i = 0; i < m; ++i) pat.mask[cols[i]] = 1;
    patterns.push_back(std::move(pat));
  }
  return patterns;
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<std::size_t> select_mcar(std::size_t n, std::size_t quota, Rng& rng) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t i = 0; i < quota; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(rows[i], rows[j]);
  }
  rows.resize(quota);
  return rows;
}

// Inclusion probabilities logistic(score + shift) summing to `quota`.
std::vector<double> calibrate(const std::vector<double>& score, std::size_t quota) {
  const auto n = score.size();
  std::vector<double> pi(n);
  if (quota >= n) {
    pi.assign(n, 1.0);
    return pi;
  }
  auto total = [&](double shift) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += logistic(score[i] + shift);
    return s;
  };
  double lo = -60.0, hi = 60.0;
  const double target = static_cast<double>(quota);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < target ? lo : hi) = mid;
  }
  const double shift = 0.5 * (lo + hi);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += (pi[i] = logistic(score[i] + shift));
  const double scale = target / sum;
  for (auto& v : pi) v = std::min(1.0, v * scale);
  return pi;
}

// Systematic PPS over a random ordering: `quota` equally spaced points with
// a uniform start, each selecting the unit whose cumulative interval holds it.
std::vector<std::size_t> select_systematic(const std::vector<double>& pi, std::size_t quota,
                                           Rng& rng) {
  const auto n = pi.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::uint8_t> taken(n, 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(quota);
  const double start = rng.uniform();
  double cum = 0.0;
  std::size_t pos = 0;
  for (std::size_t m = 0; m < quota; ++m) {
    const double point = start + static_cast<double>(m);
    while (pos < n && cum + pi[order[pos]] <= point) cum += pi[order[pos++]];
    std::size_t unit = pos < n ? order[pos] : order[n - 1];
    if (taken[unit]) {
      // Only reachable through rounding at the tail; take any free unit.
      auto it = std::find(taken.begin(), taken.end(), std::uint8_t{0});
      unit = static_cast<std::size_t>(it - taken.begin());
    }
    taken[unit] = 1;
    chosen.push_back(unit);
  }
  return chosen;
}

}  // namespace

Frame ampute(const Frame& frame, const AmputeConfig& config, std::uint64_t seed) {
  config.validate();
  if (frame.has_missing())
    throw PreconditionError("amputation requires a frame without missing cells");
  const auto& pred = frame.predictor_indices();
  const auto p = pred.size();
  if (config.patterns.front().width() != p)
    throw SchemaError("pattern width " + std::to_string(config.patterns.front().width()) +
                      " differs from predictor count " + std::to_string(p));

  const auto n = frame.n_rows();
  const auto quota = static_cast<std::size_t>(std::llround(config.prop_incomplete * static_cast<double>(n)));
  const auto n_patterns = config.patterns.size();
  Rng rng(seed);

  std::vector<std::size_t> rows;
  std::vector<std::size_t> assigned(n, 0);
  if (config.mechanism == Mechanism::MCAR) {
    rows = select_mcar(n, quota, rng);
    for (auto r : rows) assigned[r] = static_cast<std::size_t>(rng.below(n_patterns));
  } else {
    for (std::size_t i = 0; i < n; ++i) assigned[i] = static_cast<std::size_t>(rng.below(n_patterns));

    // z-score every predictor over the whole frame.
    std::vector<std::vector<double>> z(p, std::vector<double>(n));
    for (std::size_t c = 0; c < p; ++c) {
      const auto& col = frame.column(pred[c]);
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += col.cell(i);
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) ss += (col.cell(i) - mean) * (col.cell(i) - mean);
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      for (std::size_t i = 0; i < n; ++i) z[c][i] = sd > 0.0 ? (col.cell(i) - mean) / sd : 0.0;
    }

    std::vector<double> score(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& pat = config.patterns[assigned[i]];
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        if (pat.mask[c]) continue;
        const double w = config.mar_weights.empty() ? 1.0 : config.mar_weights[assigned[i]][c];
        s += w * z[c][i];
      }
      score[i] = s;
    }
    // Standardize within each candidate-pattern group.
    for (std::size_t g = 0; g < n_patterns; ++g) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (assigned[i] == g) sum += score[i], ++count;
      if (count == 0) continue;
      const double mean = sum / static_cast<double>(count);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (assigned[i] == g) ss += (score[i] - mean) * (score[i] - mean);
      const double sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (assigned[i] == g) score[i] = sd > 0.0 ? (score[i] - mean) / sd : 0.0;
    }
    rows = select_systematic(calibrate(score, quota), quota, rng);
  }

  Frame out = frame;
  for (auto r : rows) {
    const auto& pat = config.patterns[assigned[r]];
    for (std::size_t c = 0; c < p; ++c)
      if (pat.mask[c]) out.mutable_column(pred[c]).set_missing(r);
  }
  return out;
}

}  // namespace mdcv
