#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mdcv {

/// Delimiter-separated text as strings. Fields may be double-quoted; a
/// quoted field can hold the delimiter, line breaks, and doubled quotes.
/// Rows whose field count differs from the header are rejected and
/// counted, not returned.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> rejected_lines;  // 1-based physical line numbers

  std::size_t column(std::string_view name) const;  // throws SchemaError
  bool has_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, char delimiter = ',');
CsvTable read_csv(const std::filesystem::path& path, char delimiter = ',');

/// Empty fields and the literal NA mark missing cells.
bool is_missing_marker(std::string_view field);

}  // namespace mdcv
