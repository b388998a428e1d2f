#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mdcv/frame.hpp"

namespace mdcv {

enum class Mechanism { MCAR, MAR };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view text);

/// Which of the p non-outcome columns a row loses (1 = set missing).
struct MdPattern {
  std::vector<std::uint8_t> mask;

  std::size_t width() const noexcept { return mask.size(); }
  std::size_t missing_count() const;

  // Requires 1 <= missing_count() <= floor(p / 2).
  void validate() const;

  friend bool operator==(const MdPattern&, const MdPattern&) = default;
};

struct AmputeConfig {
  std::vector<MdPattern> patterns;
  Mechanism mechanism = Mechanism::MCAR;
  double prop_incomplete = 0.90;
  // MAR only: one weight vector of width p per pattern. Empty means unit
  // weight on every column the pattern leaves observed.
  std::vector<std::vector<double>> mar_weights;

  void validate() const;
};

/// Pattern count uniform on {1..p}; per pattern, missing-column count
/// uniform on {1..floor(p/2)} and the columns drawn without replacement.
std::vector<MdPattern> gen_patterns(std::size_t p, std::uint64_t seed);

/// Missing-cell injection. Exactly round(prop_incomplete * n) rows become
/// incomplete.
///
/// MCAR picks those rows uniformly and assigns each a pattern uniformly.
/// MAR first gives every row a uniformly drawn candidate pattern, scores
/// the row by a weighted sum of its z-scored still-observed columns,
/// standardizes the scores within each candidate pattern, and turns them
/// into inclusion probabilities logistic(score + shift), with the shift
/// found by bisection so the probabilities sum to the quota. Rows are then
/// drawn by systematic probability-proportional sampling, which hits the
/// quota exactly and preserves each row's inclusion probability.
Frame ampute(const Frame& frame, const AmputeConfig& config, std::uint64_t seed);

}  // namespace mdcv
