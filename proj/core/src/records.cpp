#include "mdcv/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdcv/config.hpp"
#include "mdcv/csv.hpp"
#include "mdcv/error.hpp"

namespace mdcv {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kLeadColumns = {
    "scenario",        "mechanism",       "n_train",           "n_junk",
    "model",           "replicate",       "seed",              "status",
    "chosen_k_during", "chosen_k_before", "downstream_during", "downstream_before",
    "lambda_during",   "lambda_before",   "baseline"};

const std::vector<std::string> kTimingColumns = {"replicate",    "impute_during", "impute_before",
                                                 "model_during", "model_before",  "final_impute",
                                                 "final_model"};

double value_at(const std::vector<int>& ks, const std::vector<double>& v, int k) {
  const auto it = std::find(ks.begin(), ks.end(), k);
  if (it == ks.end()) throw std::out_of_range("k = " + std::to_string(k) + " not in record grid");
  return v.at(static_cast<std::size_t>(it - ks.begin()));
}

std::string sanitize(std::string text) {
  for (auto& c : text)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    else if (c == '"') c = '\'';
  return text;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::optional<double> opt_double(const std::string& s, const std::string& what) {
  if (s == "NA") return std::nullopt;
  try {
    return parse_double(s, what);
  } catch (const InvalidConfiguration& e) {
    throw SchemaError(e.what());
  }
}

double req_double(const std::string& s, const std::string& what) {
  auto v = opt_double(s, what);
  return v ? *v : std::nan("");
}

std::int64_t req_int(const std::string& s, const std::string& what) {
  if (s == "NA") return 0;
  try {
    return parse_int(s, what);
  } catch (const InvalidConfiguration& e) {
    throw SchemaError(e.what());
  }
}

std::vector<int> grid_from_header(const std::vector<std::string>& header, const std::string& prefix) {
  std::vector<int> ks;
  for (const auto& h : header)
    if (h.rfind(prefix, 0) == 0) ks.push_back(static_cast<int>(req_int(h.substr(prefix.size()), h)));
  return ks;
}

}  // namespace

std::string SettingKey::id() const {
  return scenario + "_" + mechanism + "_n" + std::to_string(n_train) + "_j" + std::to_string(n_junk) + "_" + model;
}

double ReplicateRecord::truth_at(int k) const { return value_at(ks, truth, k); }
double ReplicateRecord::during_at(int k) const { return value_at(ks, during, k); }
double ReplicateRecord::before_at(int k) const { return value_at(ks, before, k); }

RecordSet group_records(std::vector<ReplicateRecord> records) {
  RecordSet out;
  for (auto& r : records) out[r.setting].push_back(std::move(r));
  for (auto& [key, group] : out) {
    std::sort(group.begin(), group.end(),
              [](const ReplicateRecord& a, const ReplicateRecord& b) { return a.replicate < b.replicate; });
    for (std::size_t i = 1; i < group.size(); ++i)
      if (group[i].replicate == group[i - 1].replicate)
        throw SchemaError("duplicate replicate " + std::to_string(group[i].replicate) + " in " + key.id());
  }
  return out;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NA" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_double(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

void write_records(const RecordSet& records, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "records", ec);
  fs::create_directories(dir / "timings", ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  for (const auto& [key, group] : records) {
    if (group.empty()) continue;
    const auto& ks = group.front().ks;
    std::ostringstream rec, tim;
    bool first = true;
    for (const auto& c : kLeadColumns) rec << (first ? "" : "\t") << c, first = false;
    for (const char* series : {"truth", "during", "before"})
      for (int k : ks) rec << '\t' << series << "_k" << k;
    rec << "\terror\n";
    first = true;
    for (const auto& c : kTimingColumns) tim << (first ? "" : "\t") << c, first = false;
    tim << '\n';

    for (const auto& r : group) {
      if (r.ks != ks) throw SchemaError("records of " + key.id() + " use different k grids");
      const bool ok = r.complete();
      auto num = [&](double v) { return ok ? format_double(v) : std::string("NA"); };
      rec << key.scenario << '\t' << key.mechanism << '\t' << key.n_train << '\t' << key.n_junk << '\t'
          << key.model << '\t' << r.replicate << '\t' << r.seed << '\t' << (ok ? "complete" : "failed") << '\t'
          << (ok ? std::to_string(r.chosen_k_during) : "NA") << '\t'
          << (ok ? std::to_string(r.chosen_k_before) : "NA") << '\t' << num(r.downstream_during) << '\t'
          << num(r.downstream_before) << '\t' << (ok ? format_double(r.lambda_during) : "NA") << '\t'
          << (ok ? format_double(r.lambda_before) : "NA") << '\t' << (ok ? format_double(r.baseline) : "NA");
      for (const auto* series : {&r.truth, &r.during, &r.before})
        for (std::size_t g = 0; g < ks.size(); ++g)
          rec << '\t' << (ok && g < series->size() ? format_double((*series)[g]) : "NA");
      rec << '\t' << (r.error.empty() ? "-" : sanitize(r.error)) << '\n';

      const auto& t = r.timing;
      tim << r.replicate << '\t' << format_double(t.impute_during) << '\t' << format_double(t.impute_before)
          << '\t' << format_double(t.model_during) << '\t' << format_double(t.model_before) << '\t'
          << format_double(t.final_impute) << '\t' << format_double(t.final_model) << '\n';
    }
    write_text(dir / "records" / (key.id() + ".tsv"), rec.str());
    write_text(dir / "timings" / (key.id() + ".tsv"), tim.str());
  }
}

RecordSet read_records(const fs::path& dir) {
  const auto rdir = dir / "records";
  if (!fs::is_directory(rdir)) throw IoError("no records directory under '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(rdir))
    if (e.is_regular_file() && e.path().extension() == ".tsv") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<ReplicateRecord> all;
  for (const auto& path : files) {
    const auto table = read_csv(path, '\t');
    if (!table.rejected_lines.empty())
      throw SchemaError("'" + path.string() + "' line " + std::to_string(table.rejected_lines.front()) +
                        ": wrong field count");
    for (std::size_t j = 0; j < kLeadColumns.size(); ++j)
      if (j >= table.header.size() || table.header[j] != kLeadColumns[j])
        throw SchemaError("'" + path.string() + "': unexpected header");
    const auto ks = grid_from_header(table.header, "truth_k");
    if (grid_from_header(table.header, "during_k") != ks || grid_from_header(table.header, "before_k") != ks ||
        table.header.size() != kLeadColumns.size() + 3 * ks.size() + 1 || table.header.back() != "error")
      throw SchemaError("'" + path.string() + "': inconsistent per-k columns");

    std::map<std::size_t, ReplicateTiming> timings;
    const auto tpath = dir / "timings" / path.filename();
    if (fs::exists(tpath)) {
      const auto tt = read_csv(tpath, '\t');
      if (tt.header != kTimingColumns) throw SchemaError("'" + tpath.string() + "': unexpected header");
      for (const auto& row : tt.rows) {
        ReplicateTiming t;
        t.replicate = static_cast<std::size_t>(req_int(row[0], "replicate"));
        t.impute_during = req_double(row[1], "impute_during");
        t.impute_before = req_double(row[2], "impute_before");
        t.model_during = req_double(row[3], "model_during");
        t.model_before = req_double(row[4], "model_before");
        t.final_impute = req_double(row[5], "final_impute");
        t.final_model = req_double(row[6], "final_model");
        timings[t.replicate] = t;
      }
    }

    for (const auto& row : table.rows) {
      ReplicateRecord r;
      r.setting.scenario = row[0];
      r.setting.mechanism = row[1];
      r.setting.n_train = static_cast<std::size_t>(req_int(row[2], "n_train"));
      r.setting.n_junk = static_cast<std::size_t>(req_int(row[3], "n_junk"));
      r.setting.model = row[4];
      r.replicate = static_cast<std::size_t>(req_int(row[5], "replicate"));
      try {
        r.seed = std::stoull(row[6]);
      } catch (const std::exception&) {
        throw SchemaError("'" + path.string() + "': bad seed '" + row[6] + "'");
      }
      if (row[7] != "complete" && row[7] != "failed")
        throw SchemaError("'" + path.string() + "': bad status '" + row[7] + "'");
      r.status = row[7] == "complete" ? RecordStatus::complete : RecordStatus::failed;
      r.ks = ks;
      r.error = row.back() == "-" ? "" : row.back();
      if (auto it = timings.find(r.replicate); it != timings.end()) r.timing = it->second;
      if (r.complete()) {
        r.chosen_k_during = static_cast<int>(req_int(row[8], "chosen_k_during"));
        r.chosen_k_before = static_cast<int>(req_int(row[9], "chosen_k_before"));
        r.downstream_during = req_double(row[10], "downstream_during");
        r.downstream_before = req_double(row[11], "downstream_before");
        r.lambda_during = opt_double(row[12], "lambda_during");
        r.lambda_before = opt_double(row[13], "lambda_before");
        r.baseline = opt_double(row[14], "baseline");
        const std::size_t base = kLeadColumns.size();
        for (std::size_t g = 0; g < ks.size(); ++g) {
          r.truth.push_back(req_double(row[base + g], "truth"));
          r.during.push_back(req_double(row[base + ks.size() + g], "during"));
          r.before.push_back(req_double(row[base + 2 * ks.size() + g], "before"));
        }
      }
      all.push_back(std::move(r));
    }
  }
  return group_records(std::move(all));
}

}  // namespace mdcv
