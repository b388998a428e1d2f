#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mdcv {

enum class ColumnKind { numeric, nominal };

/// One named column with per-cell missingness. Numeric cells hold a real
/// value; nominal cells hold an index into the declared level set.
class Column {
 public:
  static Column numeric(std::string name, std::vector<double> values,
                        std::vector<std::uint8_t> observed = {});
  static Column nominal(std::string name, std::vector<std::string> levels,
                        std::vector<std::int32_t> codes,
                        std::vector<std::uint8_t> observed = {});

  const std::string& name() const noexcept { return name_; }
  ColumnKind kind() const noexcept { return kind_; }
  bool is_numeric() const noexcept { return kind_ == ColumnKind::numeric; }
  bool is_nominal() const noexcept { return kind_ == ColumnKind::nominal; }
  std::size_t size() const noexcept { return observed_.size(); }

  bool observed(std::size_t row) const { return observed_[row] != 0; }
  bool missing(std::size_t row) const { return observed_[row] == 0; }
  std::size_t missing_count() const;

  double value(std::size_t row) const { return values_[row]; }
  std::int32_t code(std::size_t row) const { return codes_[row]; }

  /// Cell as a real number: the value for numeric columns, the level index
  /// for nominal columns. Only meaningful when observed.
  double cell(std::size_t row) const {
    return is_numeric() ? values_[row] : static_cast<double>(codes_[row]);
  }

  const std::vector<std::string>& levels() const noexcept { return levels_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::int32_t> codes() const noexcept { return codes_; }
  std::span<const std::uint8_t> observed_mask() const noexcept { return observed_; }

  void set_value(std::size_t row, double v);
  void set_code(std::size_t row, std::int32_t c);
  void set_missing(std::size_t row);

  /// Same name, kind, and level set.
  bool same_schema(const Column& other) const;

  Column take(std::span<const std::size_t> rows) const;
  void append(const Column& other);

  friend bool operator==(const Column&, const Column&) = default;

 private:
  Column() = default;

  std::string name_;
  ColumnKind kind_ = ColumnKind::numeric;
  std::vector<double> values_;
  std::vector<std::int32_t> codes_;
  std::vector<std::string> levels_;
  std::vector<std::uint8_t> observed_;
};

/// Ordered set of equal-length columns with an optional numeric outcome.
/// Each row also carries a provenance id (its row index in the frame it was
/// originally built as) that survives subsetting and stacking.
class Frame {
 public:
  Frame() = default;
  Frame(std::vector<Column> columns, std::optional<std::string> outcome = std::nullopt);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return columns_.size(); }

  const Column& column(std::size_t j) const { return columns_.at(j); }
  const Column& column(const std::string& name) const;
  Column& mutable_column(std::size_t j) { return columns_.at(j); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::optional<std::size_t> find(const std::string& name) const;

  const std::optional<std::string>& outcome_name() const noexcept { return outcome_; }
  std::optional<std::size_t> outcome_index() const noexcept { return outcome_index_; }
  std::vector<double> outcome() const;

  /// Indices of all non-outcome columns, in column order.
  const std::vector<std::size_t>& predictor_indices() const noexcept { return predictors_; }

  std::size_t missing_cells() const;
  bool has_missing() const { return missing_cells() > 0; }

  const std::vector<std::size_t>& row_ids() const noexcept { return row_ids_; }
  void set_row_ids(std::vector<std::size_t> ids);

  Frame take_rows(std::span<const std::size_t> rows) const;

  /// Names, kinds, levels, and outcome designation all agree.
  bool same_schema(const Frame& other) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::vector<Column> columns_;
  std::optional<std::string> outcome_;
  std::optional<std::size_t> outcome_index_;
  std::vector<std::size_t> predictors_;
  std::vector<std::size_t> row_ids_;
  std::size_t n_rows_ = 0;

  friend Frame stack(const Frame& a, const Frame& b);
};

/// Assignment of rows to v cross-validation folds.
struct FoldPlan {
  int v = 0;
  std::vector<int> assignment;
  bool grouped = false;

  std::size_t size() const noexcept { return assignment.size(); }
  std::vector<std::size_t> rows_in(int fold) const;
  std::vector<std::size_t> rows_not_in(int fold) const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Without groups: shuffle 0..n-1 by `seed`, then deal round-robin so fold
/// sizes differ by at most one. With groups: fold = rank of the row's label
/// among the sorted distinct labels, which must number exactly v.
FoldPlan make_folds(std::size_t n, int v, std::uint64_t seed,
                    std::optional<std::span<const int>> groups = std::nullopt);

/// (analysis, assessment) for one fold; row order is preserved in both.
std::pair<Frame, Frame> split(const Frame& frame, const FoldPlan& plan, int fold);

/// Row-wise concatenation, `a` first.
Frame stack(const Frame& a, const Frame& b);

}  // namespace mdcv
