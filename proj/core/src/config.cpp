#include "mdcv/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mdcv/error.hpp"

namespace mdcv {

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return text;
}

namespace {

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  return true;
}

[[noreturn]] void bad_line(std::size_t line, const std::string& why) {
  throw InvalidConfiguration("config line " + std::to_string(line) + ": " + why);
}

}  // namespace

Config Config::parse(std::string text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad_line(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!section.empty() && !valid_key(section)) bad_line(line_no, "invalid section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) bad_line(line_no, "expected 'key = value'");
    const auto key_part = trim(line.substr(0, eq));
    if (!valid_key(key_part)) bad_line(line_no, "invalid key '" + std::string(key_part) + "'");
    std::string key = section.empty() ? std::string(key_part) : section + "." + std::string(key_part);
    if (cfg.values_.count(key)) bad_line(line_no, "duplicate key '" + key + "'");
    cfg.values_.emplace(key, std::string(trim(line.substr(eq + 1))));
    cfg.order_.push_back(std::move(key));
  }
  cfg.text_ = std::move(text);
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidConfiguration("missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key, std::string fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(get(key), key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_int(get(key), key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const auto text = trim(get(key));
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidConfiguration("key '" + key + "': expected an unsigned integer, got '" + std::string(text) + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = get(key);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw InvalidConfiguration("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key, std::vector<std::string> fallback) const {
  return has(key) ? split_list(get(key)) : fallback;
}

std::vector<int> Config::get_int_list(const std::string& key, std::vector<int> fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_int_list(get(key));
  } catch (const InvalidConfiguration& e) {
    throw InvalidConfiguration("key '" + key + "': " + e.what());
  }
}

std::map<std::string, std::string> Config::section(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  const std::string lead = prefix + ".";
  for (const auto& [k, v] : values_)
    if (k.rfind(lead, 0) == 0) out.emplace(k.substr(lead.size()), v);
  return out;
}

void Config::require_known(std::span<const std::string_view> allowed) const {
  for (const auto& key : order_) {
    bool ok = false;
    for (auto a : allowed) {
      if (a.size() > 2 && a.substr(a.size() - 2) == ".*") {
        ok = key.rfind(std::string(a.substr(0, a.size() - 1)), 0) == 0;
      } else {
        ok = key == a;
      }
      if (ok) break;
    }
    if (!ok) throw InvalidConfiguration("unknown config key '" + key + "'");
  }
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw InvalidConfiguration("empty item in list '" + std::string(text) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidConfiguration(std::string(what) + ": expected a number, got '" + std::string(t) + "'");
  return v;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidConfiguration(std::string(what) + ": expected an integer, got '" + std::string(t) + "'");
  return v;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<int>(parse_int(item, "list item")));
      continue;
    }
    const auto lo = parse_int(std::string_view(item).substr(0, dots), "range start");
    const auto hi = parse_int(std::string_view(item).substr(dots + 2), "range end");
    if (hi < lo) throw InvalidConfiguration("descending range '" + item + "'");
    if (hi - lo > 1000000) throw InvalidConfiguration("range '" + item + "' is too long");
    for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace mdcv
