#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdcv {

/// Flat key-value configuration text.
///
///   # comment (also after a value)
///   key = value
///   [section]          keys below read as section.key
///   list = a, b, c     lists are comma-separated
///   ks = 1..15, 20     integer lists accept inclusive a..b ranges
///
/// Duplicate keys are an error. The original text is kept verbatim so it
/// can be echoed into run manifests.
class Config {
 public:
  Config() = default;
  static Config parse(std::string text);
  static Config load(const std::filesystem::path& path);

  const std::string& text() const noexcept { return text_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Keys in order of appearance.
  const std::vector<std::string>& keys() const noexcept { return order_; }

  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key, std::vector<std::string> fallback) const;
  std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;

  /// Keys beginning with `prefix + "."`, with the prefix stripped.
  std::map<std::string, std::string> section(const std::string& prefix) const;

  /// Throws InvalidConfiguration naming the first key outside `allowed`.
  /// An allowed entry ending in ".*" admits a whole section.
  void require_known(std::span<const std::string_view> allowed) const;

 private:
  std::string text_;
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

std::vector<std::string> split_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
std::string_view trim(std::string_view text);

}  // namespace mdcv
