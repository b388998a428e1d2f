#include "mdcv/emit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mdcv/error.hpp"
#include "mdcv/experiment.hpp"

namespace mdcv {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string x100(double v) { return fixed(100.0 * v, 2); }

std::string lead(const SettingSummary& row) {
  const auto& k = row.key;
  std::ostringstream s;
  s << k.scenario << '\t' << k.mechanism << '\t' << k.model << '\t'
    << (row.overall ? "Overall" : std::to_string(k.n_train)) << '\t'
    << (row.overall ? "Overall" : std::to_string(k.n_junk)) << '\t' << row.replicates;
  return s.str();
}

const char* kLeadHeader = "scenario\tmechanism\tmodel\tn_train\tn_junk\treplicates";

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

template <typename Cells>
std::string table(const MetricSummary& summary, const std::string& columns, Cells cells) {
  std::ostringstream s;
  s << kLeadHeader << '\t' << columns << '\n';
  for (const auto& row : summary.rows) s << lead(row) << '\t' << cells(row) << '\n';
  return s.str();
}

std::string curves(const RecordSet& records) {
  std::ostringstream s;
  s << "setting\tseries\tk\tmean\tsd\n";
  for (const auto& [key, group] : records) {
    if (group.empty()) continue;
    const auto& ks = group.front().ks;
    for (const char* series : {"truth", "during", "before"}) {
      for (std::size_t g = 0; g < ks.size(); ++g) {
        std::vector<double> v;
        for (const auto& r : group) {
          if (!r.complete()) continue;
          const auto& src = series[0] == 't' ? r.truth : series[0] == 'd' ? r.during : r.before;
          v.push_back(src[g]);
        }
        const auto ms = mean_sd(v);
        s << key.id() << '\t' << series << '\t' << ks[g] << '\t' << (v.empty() ? "NA" : fixed(ms.mean, 6))
          << '\t' << (v.size() < 2 ? "NA" : fixed(ms.sd, 6)) << '\n';
      }
    }
  }
  return s.str();
}

std::string timing(const RecordSet& records) {
  std::ostringstream s;
  s << "setting\treplicate\timpute_during\timpute_before\tratio\n";
  for (const auto& [key, group] : records)
    for (const auto& r : group) {
      if (!r.complete()) continue;
      const auto& t = r.timing;
      s << key.id() << '\t' << r.replicate << '\t' << fixed(t.impute_during, 6) << '\t'
        << fixed(t.impute_before, 6) << '\t'
        << (t.impute_before > 0.0 ? fixed(t.impute_during / t.impute_before, 4) : "NA") << '\n';
    }
  return s.str();
}

}  // namespace

std::vector<std::string> emitted_files() {
  return {"table1_truth.tsv",      "table2_difference.tsv", "table3_bias.tsv", "table4_sd.tsv",
          "table5_rmse.tsv",       "table6_downstream.tsv", "curves.tsv",      "timing.tsv",
          "timing_summary.tsv",    "manifest.json"};
}

void emit_outputs(const MetricSummary& summary, const RecordSet& records, const fs::path& dir,
                  const std::string& config_text, const std::map<std::string, std::string>& extra) {
  ensure_writable(dir);
  const auto ms = [](const MeanSd& m) { return x100(m.mean) + '\t' + x100(m.sd); };

  write_file(dir / "table1_truth.tsv", table(summary, "mean\tsd", [&](const SettingSummary& r) {
               return ms(r.truth);
             }));
  write_file(dir / "table2_difference.tsv", table(summary, "mean\tsd", [&](const SettingSummary& r) {
               return ms(r.abs_difference);
             }));
  write_file(dir / "table3_bias.tsv",
             table(summary, "during\tbefore\tduring_chosen\tbefore_chosen", [&](const SettingSummary& r) {
               return x100(r.during.per_k.bias) + '\t' + x100(r.before.per_k.bias) + '\t' +
                      x100(r.during.chosen.bias) + '\t' + x100(r.before.chosen.bias);
             }));
  write_file(dir / "table4_sd.tsv",
             table(summary, "during\tbefore\tduring_chosen\tbefore_chosen", [&](const SettingSummary& r) {
               return x100(r.during.per_k.sd_estimate) + '\t' + x100(r.before.per_k.sd_estimate) + '\t' +
                      x100(r.during.chosen.sd_estimate) + '\t' + x100(r.before.chosen.sd_estimate);
             }));
  write_file(dir / "table5_rmse.tsv",
             table(summary, "during\tbefore\tduring_chosen\tbefore_chosen", [&](const SettingSummary& r) {
               return x100(r.during.per_k.rmse) + '\t' + x100(r.before.per_k.rmse) + '\t' +
                      x100(r.during.chosen.rmse) + '\t' + x100(r.before.chosen.rmse);
             }));
  write_file(dir / "table6_downstream.tsv",
             table(summary, "during_mean\tduring_sd\tbefore_mean\tbefore_sd\tbaseline_mean\tbaseline_sd",
                   [&](const SettingSummary& r) {
                     return ms(r.during.downstream) + '\t' + ms(r.before.downstream) + '\t' +
                            (r.baseline ? ms(*r.baseline) : std::string("NA\tNA"));
                   }));
  write_file(dir / "curves.tsv", curves(records));
  write_file(dir / "timing.tsv", timing(records));
  write_file(dir / "timing_summary.tsv",
             table(summary, "ratio_mean\tratio_median\tratio_q25\tratio_q75\timpute_during_mean\timpute_before_mean",
                   [&](const SettingSummary& r) {
                     return fixed(r.timing_ratio.mean, 4) + '\t' + fixed(r.timing_quantiles.median, 4) + '\t' +
                            fixed(r.timing_quantiles.q25, 4) + '\t' + fixed(r.timing_quantiles.q75, 4) + '\t' +
                            fixed(r.impute_during_seconds.mean, 6) + '\t' + fixed(r.impute_before_seconds.mean, 6);
                   }));

  nlohmann::ordered_json manifest;
  manifest["tool"] = "mdcv";
  manifest["version"] = library_version();
  manifest["config"] = config_text;
  auto settings = nlohmann::ordered_json::array();
  std::size_t scheduled = 0, completed = 0;
  for (const auto& [key, group] : records) {
    std::size_t done = 0;
    for (const auto& r : group) done += r.complete() ? 1 : 0;
    settings.push_back({{"id", key.id()}, {"scheduled", group.size()}, {"completed", done},
                        {"failed", group.size() - done}});
    scheduled += group.size();
    completed += done;
  }
  manifest["settings"] = settings;
  manifest["scheduled"] = scheduled;
  manifest["completed"] = completed;
  manifest["failed"] = scheduled - completed;
  manifest["warnings"] = summary.warnings;
  manifest["files"] = emitted_files();
  for (const auto& [k, v] : extra) manifest["extra"][k] = v;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string manifest_config(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  if (!fs::exists(path)) return {};
  std::ifstream in(path, std::ios::binary);
  try {
    const auto j = nlohmann::json::parse(in);
    return j.value("config", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse '" + path.string() + "': " + e.what());
  }
}

MetricSummary emit_from_records(const fs::path& records_dir, const fs::path& out_dir) {
  const auto records = read_records(records_dir);
  auto summary = summarize(records);
  emit_outputs(summary, records, out_dir, manifest_config(records_dir));
  return summary;
}

std::string render_summary(const MetricSummary& summary) {
  std::ostringstream s;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-34s %5s %13s %12s %13s %13s %13s %13s\n", "setting (x100)", "reps",
                "truth", "|d-b|", "bias d/b", "sd d/b", "rmse d/b", "tuned d/b");
  s << buf;
  for (const auto& r : summary.rows) {
    std::snprintf(buf, sizeof buf,
                  "%-34s %5zu %6.2f(%5.2f) %5.2f(%5.2f) %6.2f/%6.2f %6.2f/%6.2f %6.2f/%6.2f %6.2f/%6.2f\n",
                  r.label().c_str(), r.replicates, 100 * r.truth.mean, 100 * r.truth.sd,
                  100 * r.abs_difference.mean, 100 * r.abs_difference.sd, 100 * r.during.per_k.bias,
                  100 * r.before.per_k.bias, 100 * r.during.per_k.sd_estimate, 100 * r.before.per_k.sd_estimate,
                  100 * r.during.per_k.rmse, 100 * r.before.per_k.rmse, 100 * r.during.downstream.mean,
                  100 * r.before.downstream.mean);
    s << buf;
  }
  return s.str();
}

}  // namespace mdcv
