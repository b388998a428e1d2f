#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mdcv/frame.hpp"

namespace mdcv {

/// Per-column scaling for Gower dissimilarity, frozen from the fit data.
/// Covers the non-outcome columns of the fit frame, in column order.
struct GowerSpace {
  std::vector<std::size_t> columns;  // frame column indices
  std::vector<ColumnKind> kinds;
  std::vector<double> min;    // numeric columns; 0 for nominal
  std::vector<double> range;  // numeric columns; 0 marks non-discriminating
  std::vector<std::size_t> n_levels;

  static GowerSpace fit(const Frame& donors);
  std::size_t width() const noexcept { return columns.size(); }
};

/// Mean of the per-column dissimilarities over the columns observed in both
/// rows. Numeric: |a - b| / range clipped to [0, 1] (0 when range is 0).
/// Nominal: 0 when the levels match, 1 otherwise. Returns nullopt when the
/// rows share no observed column.
std::optional<double> gower_distance(const Frame& a, std::size_t row_a, const Frame& b,
                                     std::size_t row_b, const GowerSpace& space);

/// Mean (numeric) and mode (nominal, ties to the earliest declared level)
/// of the observed donor cells.
class SimpleImputer {
 public:
  static SimpleImputer fit(const Frame& donors);

  bool defined(std::size_t column) const { return defined_.at(column) != 0; }
  /// Fill value for a column: the mean, or the mode's level code.
  double fill(std::size_t column) const { return fill_.at(column); }

  Frame transform(const Frame& recipients) const;

 private:
  std::optional<std::string> outcome_;
  std::vector<std::uint8_t> defined_;
  std::vector<double> fill_;
  std::vector<std::string> names_;
};

/// Gower-space k-nearest-neighbour imputer bound to a donor table.
class KnnImputer {
 public:
  KnnImputer(std::shared_ptr<const Frame> donors, int k);

  const Frame& donors() const noexcept { return *donors_; }
  const GowerSpace& space() const noexcept { return space_; }
  const SimpleImputer& fallback() const noexcept { return fallback_; }
  int k() const noexcept { return k_; }

 private:
  std::shared_ptr<const Frame> donors_;
  GowerSpace space_;
  SimpleImputer fallback_;
  int k_;
};

KnnImputer fit_knn(Frame donors, int k);

/// Fills every missing predictor cell of `recipients` from the k nearest
/// donors that have that cell observed (ties by donor row index; numeric
/// mean, nominal mode). Falls back to the donor mean/mode when no donor is
/// eligible. Observed cells and the outcome pass through untouched.
Frame transform(const KnnImputer& imputer, const Frame& recipients);

/// Imputes the donor table against itself.
Frame transform_self(const KnnImputer& imputer);

using ImputedGrid = std::map<int, Frame>;

/// transform() for every k in `ks` at once: each recipient's donor ranking
/// is built a single time and its prefixes are aggregated incrementally.
/// Results are bit-identical to per-k calls.
ImputedGrid impute_grid(const KnnImputer& imputer, const Frame& recipients,
                        std::span<const int> ks);
ImputedGrid impute_grid(const Frame& donors, const Frame& recipients, std::span<const int> ks);
/// Self-imputation of `donors` for every k.
ImputedGrid impute_grid(const Frame& donors, std::span<const int> ks);

}  // namespace mdcv
