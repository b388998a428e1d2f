#include "mdcv/impute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdcv/error.hpp"

namespace mdcv {

GowerSpace GowerSpace::fit(const Frame& donors) {
  GowerSpace s;
  for (auto j : donors.predictor_indices()) {
    const auto& col = donors.column(j);
    s.columns.push_back(j);
    s.kinds.push_back(col.kind());
    if (col.is_numeric()) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < col.size(); ++i) {
        if (!col.observed(i)) continue;
        lo = std::min(lo, col.value(i));
        hi = std::max(hi, col.value(i));
      }
      if (lo > hi) lo = hi = 0.0;  // no observed cells; fit_knn rejects this earlier
      s.min.push_back(lo);
      s.range.push_back(hi - lo);
      s.n_levels.push_back(0);
    } else {
      s.min.push_back(0.0);
      s.range.push_back(0.0);
      s.n_levels.push_back(col.levels().size());
    }
  }
  return s;
}

std::optional<double> gower_distance(const Frame& a, std::size_t row_a, const Frame& b,
                                     std::size_t row_b, const GowerSpace& space) {
  double sum = 0.0;
  std::size_t usable = 0;
  for (std::size_t c = 0; c < space.width(); ++c) {
    const auto& ca = a.column(space.columns[c]);
    const auto& cb = b.column(space.columns[c]);
    if (!ca.observed(row_a) || !cb.observed(row_b)) continue;
    double d;
    if (space.kinds[c] == ColumnKind::numeric) {
      d = space.range[c] > 0.0 ? std::fabs(ca.value(row_a) - cb.value(row_b)) / space.range[c] : 0.0;
      if (d > 1.0) d = 1.0;
    } else {
      d = ca.code(row_a) != cb.code(row_b) ? 1.0 : 0.0;
    }
    sum += d;
    ++usable;
  }
  if (usable == 0) return std::nullopt;
  return sum / static_cast<double>(usable);
}

// -- SimpleImputer ----------------------------------------------------------

SimpleImputer SimpleImputer::fit(const Frame& donors) {
  SimpleImputer s;
  s.outcome_ = donors.outcome_name();
  const auto n_cols = donors.n_cols();
  s.defined_.assign(n_cols, 0);
  s.fill_.assign(n_cols, 0.0);
  for (std::size_t j = 0; j < n_cols; ++j) {
    const auto& col = donors.column(j);
    s.names_.push_back(col.name());
    if (donors.outcome_index() == j) continue;
    if (col.is_numeric()) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < col.size(); ++i)
        if (col.observed(i)) sum += col.value(i), ++count;
      if (count > 0) {
        s.defined_[j] = 1;
        s.fill_[j] = sum / static_cast<double>(count);
      }
    } else {
      std::vector<std::size_t> counts(col.levels().size(), 0);
      bool any = false;
      for (std::size_t i = 0; i < col.size(); ++i)
        if (col.observed(i)) ++counts[static_cast<std::size_t>(col.code(i))], any = true;
      if (any) {
        s.defined_[j] = 1;
        s.fill_[j] = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      }
    }
  }
  return s;
}

Frame SimpleImputer::transform(const Frame& recipients) const {
  if (recipients.n_cols() != names_.size() || recipients.outcome_name() != outcome_)
    throw SchemaError("recipient schema differs from the fit schema");
  Frame out = recipients;
  for (std::size_t j = 0; j < out.n_cols(); ++j) {
    if (out.outcome_index() == j) continue;
    auto& col = out.mutable_column(j);
    if (col.name() != names_[j]) throw SchemaError("recipient column order differs from fit");
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col.observed(i)) continue;
      if (!defined_[j]) throw ImputationError(col.name(), "no observed donor cells to impute from");
      if (col.is_numeric())
        col.set_value(i, fill_[j]);
      else
        col.set_code(i, static_cast<std::int32_t>(fill_[j]));
    }
  }
  return out;
}

// -- KnnImputer -------------------------------------------------------------

KnnImputer::KnnImputer(std::shared_ptr<const Frame> donors, int k)
    : donors_(std::move(donors)), k_(k) {
  if (!donors_ || donors_->n_rows() == 0) throw InvalidConfiguration("donor table is empty");
  if (k_ < 1) throw InvalidConfiguration("neighbour count k must be >= 1");
  for (auto j : donors_->predictor_indices()) {
    const auto& col = donors_->column(j);
    if (col.missing_count() == col.size())
      throw ImputationError(col.name(), "no observed cells to fit an imputer on");
  }
  space_ = GowerSpace::fit(*donors_);
  fallback_ = SimpleImputer::fit(*donors_);
}

KnnImputer fit_knn(Frame donors, int k) {
  return KnnImputer(std::make_shared<const Frame>(std::move(donors)), k);
}

namespace {

// Row-major copy of the Gower columns so the distance loop is contiguous.
struct PackedRows {
  std::size_t width = 0;
  std::vector<double> cells;
  std::vector<std::uint8_t> observed;

  PackedRows(const Frame& frame, const GowerSpace& space) : width(space.width()) {
    const auto n = frame.n_rows();
    cells.resize(n * width);
    observed.resize(n * width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto& col = frame.column(space.columns[c]);
      for (std::size_t i = 0; i < n; ++i) {
        observed[i * width + c] = col.observed(i) ? 1 : 0;
        cells[i * width + c] = col.cell(i);
      }
    }
  }
  const double* row(std::size_t i) const { return cells.data() + i * width; }
  const std::uint8_t* mask(std::size_t i) const { return observed.data() + i * width; }
};

struct Neighbor {
  double dist;
  std::uint32_t donor;
};

inline bool closer(const Neighbor& a, const Neighbor& b) {
  return a.dist < b.dist || (a.dist == b.dist && a.donor < b.donor);
}

// Candidates ordered lazily: a sorted prefix first, the rest on demand.
class Ranking {
 public:
  void reset(std::size_t prefix) {
    sorted_ = std::min(prefix, cand_.size());
    std::partial_sort(cand_.begin(), cand_.begin() + static_cast<std::ptrdiff_t>(sorted_),
                      cand_.end(), closer);
  }
  std::size_t size() const { return cand_.size(); }
  const Neighbor& at(std::size_t i) {
    if (i >= sorted_) {
      std::sort(cand_.begin() + static_cast<std::ptrdiff_t>(sorted_), cand_.end(), closer);
      sorted_ = cand_.size();
    }
    return cand_[i];
  }
  std::vector<Neighbor>& candidates() { return cand_; }

 private:
  std::vector<Neighbor> cand_;
  std::size_t sorted_ = 0;
};

class GridEngine {
 public:
  GridEngine(const KnnImputer& imputer, const Frame& recipients, std::span<const int> ks)
      : imp_(imputer), rec_(recipients), space_(imputer.space()) {
    if (!recipients.same_schema(imputer.donors()))
      throw SchemaError("recipient schema differs from the donor schema");
    if (ks.empty()) throw InvalidConfiguration("k grid must be nonempty");
    ks_.assign(ks.begin(), ks.end());
    std::sort(ks_.begin(), ks_.end());
    ks_.erase(std::unique(ks_.begin(), ks_.end()), ks_.end());
    if (ks_.front() < 1) throw InvalidConfiguration("neighbour count k must be >= 1");
    k_max_ = static_cast<std::size_t>(ks_.back());
  }

  ImputedGrid run() {
    const PackedRows donors(imp_.donors(), space_);
    const PackedRows recips(rec_, space_);
    const std::size_t w = space_.width();
    const std::size_t n_donors = imp_.donors().n_rows();

    std::vector<Frame> outs(ks_.size(), rec_);
    Ranking ranking;
    std::vector<std::size_t> missing_cols;
    std::vector<std::size_t> level_counts;
    // Fill values per k for the column being processed.
    std::vector<double> fills(ks_.size());

    for (std::size_t r = 0; r < rec_.n_rows(); ++r) {
      const std::uint8_t* rmask = recips.mask(r);
      missing_cols.clear();
      for (std::size_t c = 0; c < w; ++c)
        if (!rmask[c]) missing_cols.push_back(c);
      if (missing_cols.empty()) continue;

      const double* rvals = recips.row(r);
      auto& cand = ranking.candidates();
      cand.clear();
      for (std::size_t d = 0; d < n_donors; ++d) {
        const double* dvals = donors.row(d);
        const std::uint8_t* dmask = donors.mask(d);
        double sum = 0.0;
        std::size_t usable = 0;
        for (std::size_t c = 0; c < w; ++c) {
          if (!rmask[c] || !dmask[c]) continue;
          double diff;
          if (space_.kinds[c] == ColumnKind::numeric) {
            diff = space_.range[c] > 0.0 ? std::fabs(rvals[c] - dvals[c]) / space_.range[c] : 0.0;
            if (diff > 1.0) diff = 1.0;
          } else {
            diff = rvals[c] != dvals[c] ? 1.0 : 0.0;
          }
          sum += diff;
          ++usable;
        }
        if (usable == 0) continue;  // incomparable donor
        cand.push_back({sum / static_cast<double>(usable), static_cast<std::uint32_t>(d)});
      }
      ranking.reset(std::max<std::size_t>(4 * k_max_, 64));

      for (auto c : missing_cols) {
        aggregate(ranking, donors, c, fills);
        const auto j = space_.columns[c];
        for (std::size_t g = 0; g < ks_.size(); ++g) {
          auto& col = outs[g].mutable_column(j);
          if (space_.kinds[c] == ColumnKind::numeric)
            col.set_value(r, fills[g]);
          else
            col.set_code(r, static_cast<std::int32_t>(fills[g]));
        }
      }
    }

    ImputedGrid grid;
    for (std::size_t g = 0; g < ks_.size(); ++g) grid.emplace(ks_[g], std::move(outs[g]));
    return grid;
  }

 private:
  // Walks eligible donors for column c in rank order and records the
  // aggregate at each k of the grid.
  void aggregate(Ranking& ranking, const PackedRows& donors, std::size_t c,
                 std::vector<double>& fills) {
    const bool numeric = space_.kinds[c] == ColumnKind::numeric;
    const std::size_t w = donors.width;
    double sum = 0.0;
    std::size_t taken = 0;
    std::size_t next = 0;  // next grid slot to fill
    if (!numeric) counts_.assign(space_.n_levels[c], 0);

    auto current = [&]() -> double {
      if (numeric) return sum / static_cast<double>(taken);
      return static_cast<double>(std::max_element(counts_.begin(), counts_.end()) - counts_.begin());
    };

    for (std::size_t i = 0; i < ranking.size() && taken < k_max_; ++i) {
      const auto& nb = ranking.at(i);
      if (!donors.observed[nb.donor * w + c]) continue;
      const double v = donors.cells[nb.donor * w + c];
      if (numeric)
        sum += v;
      else
        ++counts_[static_cast<std::size_t>(v)];
      ++taken;
      while (next < ks_.size() && static_cast<std::size_t>(ks_[next]) == taken)
        fills[next++] = current();
    }
    if (next == ks_.size()) return;
    if (taken > 0) {
      const double v = current();
      for (; next < ks_.size(); ++next) fills[next] = v;
      return;
    }
    const auto j = space_.columns[c];
    if (!imp_.fallback().defined(j))
      throw ImputationError(imp_.donors().column(j).name(), "no observed donor cells to impute from");
    for (; next < ks_.size(); ++next) fills[next] = imp_.fallback().fill(j);
  }

  const KnnImputer& imp_;
  const Frame& rec_;
  const GowerSpace& space_;
  std::vector<int> ks_;
  std::size_t k_max_ = 1;
  std::vector<std::size_t> counts_;
};

}  // namespace

ImputedGrid impute_grid(const KnnImputer& imputer, const Frame& recipients,
                        std::span<const int> ks) {
  return GridEngine(imputer, recipients, ks).run();
}

ImputedGrid impute_grid(const Frame& donors, const Frame& recipients, std::span<const int> ks) {
  const KnnImputer imp = fit_knn(donors, 1);
  return impute_grid(imp, recipients, ks);
}

ImputedGrid impute_grid(const Frame& donors, std::span<const int> ks) {
  const KnnImputer imp = fit_knn(donors, 1);
  return impute_grid(imp, imp.donors(), ks);
}

Frame transform(const KnnImputer& imputer, const Frame& recipients) {
  const int k = imputer.k();
  auto grid = impute_grid(imputer, recipients, std::span<const int>(&k, 1));
  return std::move(grid.begin()->second);
}

Frame transform_self(const KnnImputer& imputer) { return transform(imputer, imputer.donors()); }

}  // namespace mdcv
