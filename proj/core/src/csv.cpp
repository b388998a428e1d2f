#include "mdcv/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mdcv/config.hpp"
#include "mdcv/error.hpp"

namespace mdcv {

namespace {

// Splits one logical record starting at `pos`; advances `pos` and `line`.
// Returns false when the record is malformed (unterminated quote or stray
// characters after a closing quote); the caller skips to the next record.
bool next_record(std::string_view text, std::size_t& pos, std::size_t& line, char delim,
                 std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool ok = true;
  bool quoted = false;
  bool after_quote = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == delim) {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
      ++line;
      fields.push_back(std::move(field));
      return ok;
    }
    if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
      continue;
    }
    if (after_quote) ok = false;
    field.push_back(c);
  }
  if (quoted) ok = false;
  fields.push_back(std::move(field));
  return ok;
}

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace

bool is_missing_marker(std::string_view field) {
  const auto t = trim(field);
  return t.empty() || t == "NA";
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError("column '" + std::string(name) + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable parse_csv(std::string_view text, char delimiter) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  CsvTable table;
  std::size_t pos = 0, line = 1;
  std::vector<std::string> fields;
  while (pos < text.size()) {
    if (!next_record(text, pos, line, delimiter, fields)) throw SchemaError("malformed header row");
    if (!blank(fields)) break;
    fields.clear();
  }
  if (fields.empty() || blank(fields)) throw SchemaError("input has no header row");
  for (auto& f : fields) table.header.emplace_back(trim(f));
  while (pos < text.size()) {
    const std::size_t start_line = line;
    const bool ok = next_record(text, pos, line, delimiter, fields);
    if (blank(fields)) continue;
    if (!ok || fields.size() != table.header.size()) {
      table.rejected_lines.push_back(start_line);
      continue;
    }
    table.rows.push_back(fields);
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), delimiter);
}

}  // namespace mdcv
