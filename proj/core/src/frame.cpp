#include "mdcv/frame.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "mdcv/error.hpp"
#include "mdcv/random.hpp"

namespace mdcv {

Column Column::numeric(std::string name, std::vector<double> values,
                       std::vector<std::uint8_t> observed) {
  if (observed.empty()) observed.assign(values.size(), 1);
  if (observed.size() != values.size())
    throw SchemaError("column '" + name + "': mask length differs from value count");
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::numeric;
  c.values_ = std::move(values);
  c.observed_ = std::move(observed);
  for (std::size_t i = 0; i < c.values_.size(); ++i)
    if (!c.observed_[i]) c.values_[i] = 0.0;
  return c;
}

Column Column::nominal(std::string name, std::vector<std::string> levels,
                       std::vector<std::int32_t> codes,
                       std::vector<std::uint8_t> observed) {
  if (observed.empty()) observed.assign(codes.size(), 1);
  if (observed.size() != codes.size())
    throw SchemaError("column '" + name + "': mask length differs from code count");
  if (std::set<std::string>(levels.begin(), levels.end()).size() != levels.size())
    throw SchemaError("column '" + name + "': duplicate level");
  const auto n_levels = static_cast<std::int32_t>(levels.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (!observed[i]) {
      codes[i] = 0;
      continue;
    }
    if (codes[i] < 0 || codes[i] >= n_levels)
      throw SchemaError("column '" + name + "': level code outside declared level set");
  }
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::nominal;
  c.codes_ = std::move(codes);
  c.levels_ = std::move(levels);
  c.observed_ = std::move(observed);
  return c;
}

std::size_t Column::missing_count() const {
  return static_cast<std::size_t>(std::count(observed_.begin(), observed_.end(), 0));
}

void Column::set_value(std::size_t row, double v) {
  if (!is_numeric()) throw SchemaError("column '" + name_ + "' is not numeric");
  values_.at(row) = v;
  observed_[row] = 1;
}

void Column::set_code(std::size_t row, std::int32_t c) {
  if (!is_nominal()) throw SchemaError("column '" + name_ + "' is not nominal");
  if (c < 0 || c >= static_cast<std::int32_t>(levels_.size()))
    throw SchemaError("column '" + name_ + "': level code outside declared level set");
  codes_.at(row) = c;
  observed_[row] = 1;
}

void Column::set_missing(std::size_t row) {
  observed_.at(row) = 0;
  if (is_numeric())
    values_[row] = 0.0;
  else
    codes_[row] = 0;
}

bool Column::same_schema(const Column& other) const {
  return name_ == other.name_ && kind_ == other.kind_ && levels_ == other.levels_;
}

Column Column::take(std::span<const std::size_t> rows) const {
  Column c;
  c.name_ = name_;
  c.kind_ = kind_;
  c.levels_ = levels_;
  c.observed_.reserve(rows.size());
  if (is_numeric()) {
    c.values_.reserve(rows.size());
    for (auto r : rows) c.values_.push_back(values_.at(r));
  } else {
    c.codes_.reserve(rows.size());
    for (auto r : rows) c.codes_.push_back(codes_.at(r));
  }
  for (auto r : rows) c.observed_.push_back(observed_[r]);
  return c;
}

void Column::append(const Column& other) {
  if (!same_schema(other)) throw SchemaError("column '" + name_ + "': schema mismatch");
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  codes_.insert(codes_.end(), other.codes_.begin(), other.codes_.end());
  observed_.insert(observed_.end(), other.observed_.begin(), other.observed_.end());
}

Frame::Frame(std::vector<Column> columns, std::optional<std::string> outcome)
    : columns_(std::move(columns)), outcome_(std::move(outcome)) {
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  std::set<std::string> names;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& c = columns_[j];
    if (c.size() != n_rows_)
      throw SchemaError("column '" + c.name() + "' has " + std::to_string(c.size()) +
                        " cells, expected " + std::to_string(n_rows_));
    if (!names.insert(c.name()).second)
      throw SchemaError("duplicate column name '" + c.name() + "'");
    if (outcome_ && c.name() == *outcome_) {
      if (!c.is_numeric()) throw SchemaError("outcome '" + c.name() + "' must be numeric");
      if (c.missing_count() > 0)
        throw SchemaError("outcome '" + c.name() + "' contains missing cells");
      outcome_index_ = j;
    } else {
      predictors_.push_back(j);
    }
  }
  if (outcome_ && !outcome_index_)
    throw SchemaError("outcome column '" + *outcome_ + "' not present");
  row_ids_.resize(n_rows_);
  std::iota(row_ids_.begin(), row_ids_.end(), std::size_t{0});
}

const Column& Frame::column(const std::string& name) const {
  auto j = find(name);
  if (!j) throw SchemaError("no column named '" + name + "'");
  return columns_[*j];
}

std::optional<std::size_t> Frame::find(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (columns_[j].name() == name) return j;
  return std::nullopt;
}

std::vector<double> Frame::outcome() const {
  if (!outcome_index_) throw SchemaError("frame has no outcome column");
  auto v = columns_[*outcome_index_].values();
  return {v.begin(), v.end()};
}

std::size_t Frame::missing_cells() const {
  std::size_t total = 0;
  for (const auto& c : columns_) total += c.missing_count();
  return total;
}

void Frame::set_row_ids(std::vector<std::size_t> ids) {
  if (ids.size() != n_rows_) throw SchemaError("row id count differs from row count");
  row_ids_ = std::move(ids);
}

Frame Frame::take_rows(std::span<const std::size_t> rows) const {
  Frame out;
  out.columns_.reserve(columns_.size());
  for (const auto& c : columns_) out.columns_.push_back(c.take(rows));
  out.outcome_ = outcome_;
  out.outcome_index_ = outcome_index_;
  out.predictors_ = predictors_;
  out.n_rows_ = rows.size();
  out.row_ids_.reserve(rows.size());
  for (auto r : rows) out.row_ids_.push_back(row_ids_.at(r));
  return out;
}

bool Frame::same_schema(const Frame& other) const {
  if (columns_.size() != other.columns_.size() || outcome_ != other.outcome_) return false;
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (!columns_[j].same_schema(other.columns_[j])) return false;
  return true;
}

std::vector<std::size_t> FoldPlan::rows_in(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldPlan::rows_not_in(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) rows.push_back(i);
  return rows;
}

FoldPlan make_folds(std::size_t n, int v, std::uint64_t seed,
                    std::optional<std::span<const int>> groups) {
  if (v < 2) throw InvalidConfiguration("fold count must be at least 2");
  if (n < static_cast<std::size_t>(v))
    throw InvalidConfiguration("cannot cut " + std::to_string(n) + " rows into " +
                               std::to_string(v) + " folds");
  FoldPlan plan;
  plan.v = v;
  plan.assignment.assign(n, 0);
  if (groups) {
    if (groups->size() != n) throw InvalidConfiguration("group label count differs from n");
    std::vector<int> labels(groups->begin(), groups->end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.size() != static_cast<std::size_t>(v))
      throw InvalidConfiguration("grouped folds need exactly v distinct labels, got " +
                                 std::to_string(labels.size()));
    for (std::size_t i = 0; i < n; ++i) {
      auto it = std::lower_bound(labels.begin(), labels.end(), (*groups)[i]);
      plan.assignment[i] = static_cast<int>(it - labels.begin());
    }
    plan.grouped = true;
    return plan;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t i = 0; i < n; ++i)
    plan.assignment[order[i]] = static_cast<int>(i % static_cast<std::size_t>(v));
  return plan;
}

std::pair<Frame, Frame> split(const Frame& frame, const FoldPlan& plan, int fold) {
  if (fold < 0 || fold >= plan.v)
    throw std::out_of_range("fold " + std::to_string(fold) + " outside [0, " +
                            std::to_string(plan.v) + ")");
  if (plan.size() != frame.n_rows())
    throw SchemaError("fold plan length differs from frame row count");
  const auto in = plan.rows_in(fold);
  const auto out = plan.rows_not_in(fold);
  return {frame.take_rows(out), frame.take_rows(in)};
}

Frame stack(const Frame& a, const Frame& b) {
  if (!a.same_schema(b)) throw SchemaError("cannot stack frames with different schemas");
  Frame out = a;
  for (std::size_t j = 0; j < out.columns_.size(); ++j) out.columns_[j].append(b.columns_[j]);
  out.n_rows_ = a.n_rows_ + b.n_rows_;
  out.row_ids_.insert(out.row_ids_.end(), b.row_ids_.begin(), b.row_ids_.end());
  return out;
}

}  // namespace mdcv
