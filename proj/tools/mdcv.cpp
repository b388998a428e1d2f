// Command-line front end: simulate, summarize, realdata, emit.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mdcv/emit.hpp"
#include "mdcv/error.hpp"
#include "mdcv/experiment.hpp"
#include "mdcv/realdata.hpp"
#include "mdcv/summary.hpp"

namespace {

constexpr int kExitIncomplete = 1;
constexpr int kExitError = 2;

void print_warnings(const mdcv::MetricSummary& summary) {
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
}

// Progress on stderr, about twenty lines per run.
class Progress {
 public:
  explicit Progress(std::size_t total) : total_(total), step_(std::max<std::size_t>(1, total / 20)) {}
  void tick(const mdcv::ReplicateRecord& r) {
    ++done_;
    if (!r.complete()) std::cerr << "failed: " << r.setting.id() << " #" << r.replicate << ": " << r.error << '\n';
    if (done_ % step_ == 0 || done_ == total_) std::cerr << "progress: " << done_ << "/" << total_ << '\n';
  }

 private:
  std::size_t total_, step_, done_ = 0;
};

int report(const mdcv::SimulationRun& run, const std::filesystem::path& out) {
  const auto summary = mdcv::summarize(run.records);
  print_warnings(summary);
  std::cout << mdcv::render_summary(summary);
  std::cout << "records: " << out.string() << "  completed " << run.completed << "/" << run.scheduled
            << (run.failed ? "  failed " + std::to_string(run.failed) : std::string()) << '\n';
  return run.all_complete() ? 0 : kExitIncomplete;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imputation during vs before cross-validation: simulation and real-data harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mdcv::library_version());

  std::string config_path, records_dir, out_dir, csv_path, schema_path, rerun_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  auto* simulate = app.add_subcommand("simulate", "Run a simulation campaign");
  simulate->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  simulate->add_option("--rerun-failed", rerun_dir, "Rerun only the failed replicates recorded in this directory")
      ->check(CLI::ExistingDirectory);

  auto* summarize = app.add_subcommand("summarize", "Print summary tables for a records directory");
  summarize->add_option("--records", records_dir, "Directory written by simulate or realdata")
      ->required()
      ->check(CLI::ExistingDirectory);

  auto* realdata = app.add_subcommand("realdata", "Resampling study on a CSV dataset");
  realdata->add_option("--csv", csv_path, "Data file with a header row")->required()->check(CLI::ExistingFile);
  realdata->add_option("--schema", schema_path, "Schema file")->required()->check(CLI::ExistingFile);
  realdata->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  realdata->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* emit = app.add_subcommand("emit", "Write tables, curves, timing, and manifest files");
  emit->add_option("--records", records_dir, "Directory written by simulate or realdata")
      ->required()
      ->check(CLI::ExistingDirectory);
  emit->add_option("--out", out_dir, "Destination directory")->required();

  for (auto* sub : {simulate, realdata}) {
    sub->add_option("--workers", workers, "Worker threads (overrides config)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Base seed (overrides config)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      auto cfg = mdcv::ExperimentConfig::from_config(mdcv::Config::load(config_path));
      if (workers) cfg.workers = *workers;
      if (seed) cfg.base_seed = *seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!rerun_dir.empty()) cfg.only = mdcv::failed_replicates(mdcv::read_records(rerun_dir));
      cfg.validate();
      mdcv::ensure_writable(cfg.output_dir);

      std::size_t total = 0;
      for (const auto& s : cfg.settings()) {
        if (!cfg.only) total += cfg.n_replicates;
        else if (auto it = cfg.only->find(s.id()); it != cfg.only->end()) total += it->second.size();
      }
      Progress progress(total);
      const auto run = mdcv::run_simulation(cfg, [&](const mdcv::ReplicateRecord& r) { progress.tick(r); });
      mdcv::persist_run(run, cfg.config_text, cfg.output_dir);
      const auto summary = mdcv::summarize(run.records);
      mdcv::emit_outputs(summary, run.records, cfg.output_dir / "tables", cfg.config_text);
      return report(run, cfg.output_dir);
    }
    if (*summarize) {
      const auto records = mdcv::read_records(records_dir);
      const auto summary = mdcv::summarize(records);
      print_warnings(summary);
      std::cout << mdcv::render_summary(summary);
      return 0;
    }
    if (*realdata) {
      auto cfg = mdcv::RealDataConfig::from_config(mdcv::Config::load(config_path));
      if (workers) cfg.workers = *workers;
      if (seed) cfg.base_seed = *seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto result = mdcv::run_realdata(csv_path, schema_path, cfg);
      std::cerr << "rows read " << result.rows_read << ", used " << result.rows_used << ", rejected "
                << result.rejected_parse + result.rejected_missing << "; split " << result.n_train << "/"
                << result.n_test << '\n';
      return report(result.run, cfg.output_dir);
    }
    if (*emit) {
      const auto summary = mdcv::emit_from_records(records_dir, out_dir);
      print_warnings(summary);
      std::cout << "wrote " << mdcv::emitted_files().size() << " files to " << out_dir << '\n';
      return 0;
    }
  } catch (const mdcv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
