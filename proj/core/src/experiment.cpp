#include "mdcv/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "mdcv/cvengine.hpp"
#include "mdcv/error.hpp"
#include "mdcv/random.hpp"

namespace mdcv {

namespace fs = std::filesystem;

namespace {

// Stream tags for the per-replicate seed tree.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kPatternStream = 2;
constexpr std::uint64_t kAmputeTrainStream = 3;
constexpr std::uint64_t kAmputeValidStream = 4;
constexpr std::uint64_t kEngineStream = 5;
constexpr std::uint64_t kFaultStream = 6;

constexpr std::array<std::string_view, 24> kKnownKeys = {
    "scenarios", "mechanisms",     "n_train",  "n_junk",     "ks",        "v",
    "n_replicates", "base_seed",   "workers",  "n_valid",    "prop_incomplete", "group_mean_sd",
    "rho",       "sigma_eps",      "model",    "fault_rate", "output_dir", "lasso.max_inner_folds",
    "lasso.n_lambda", "lasso.lambda_min_ratio", "lasso.tolerance", "forest.n_trees", "forest.mtry",
    "forest.min_leaf"};

template <typename T>
std::vector<T> sizes(const Config& cfg, const std::string& key, std::vector<T> fallback) {
  if (!cfg.has(key)) return fallback;
  std::vector<T> out;
  for (int v : cfg.get_int_list(key, {})) {
    if (v < 0) throw InvalidConfiguration("key '" + key + "' must be non-negative");
    out.push_back(static_cast<T>(v));
  }
  return out;
}

std::size_t find_k(const std::vector<int>& ks, int k) {
  return static_cast<std::size_t>(std::find(ks.begin(), ks.end(), k) - ks.begin());
}

}  // namespace

std::string library_version() {
#ifdef MDCV_VERSION
  return MDCV_VERSION;
#else
  return "unknown";
#endif
}

Learner ModelSpec::learner() const {
  if (family == "lasso") return lasso_learner(max_inner_folds, lasso);
  if (family == "ols") return ols_learner();
  if (family == "forest") return forest_learner(forest);
  throw InvalidConfiguration("unknown model family '" + family + "'");
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
  cfg.require_known(kKnownKeys);
  ExperimentConfig out;
  if (cfg.has("scenarios")) {
    out.scenarios.clear();
    for (const auto& s : cfg.get_list("scenarios", {})) out.scenarios.push_back(parse_scenario(s));
  }
  if (cfg.has("mechanisms")) {
    out.mechanisms.clear();
    for (const auto& m : cfg.get_list("mechanisms", {})) out.mechanisms.push_back(parse_mechanism(m));
  }
  out.n_train = sizes<std::size_t>(cfg, "n_train", out.n_train);
  out.n_junk = sizes<std::size_t>(cfg, "n_junk", out.n_junk);
  out.ks = cfg.get_int_list("ks", out.ks);
  out.v = static_cast<int>(cfg.get_int("v", out.v));
  const auto reps = cfg.get_int("n_replicates", static_cast<std::int64_t>(out.n_replicates));
  if (reps < 1) throw InvalidConfiguration("n_replicates must be >= 1");
  out.n_replicates = static_cast<std::size_t>(reps);
  out.base_seed = cfg.get_u64("base_seed", out.base_seed);
  out.workers = static_cast<int>(cfg.get_int("workers", out.workers));
  const auto n_valid = cfg.get_int("n_valid", static_cast<std::int64_t>(out.n_valid));
  if (n_valid < 2) throw InvalidConfiguration("n_valid must be >= 2");
  out.n_valid = static_cast<std::size_t>(n_valid);
  out.prop_incomplete = cfg.get_double("prop_incomplete", out.prop_incomplete);
  out.group_mean_sd = cfg.get_double("group_mean_sd", out.group_mean_sd);
  out.rho = cfg.get_double("rho", out.rho);
  out.sigma_eps = cfg.get_double("sigma_eps", out.sigma_eps);
  out.model.family = cfg.get_or("model", out.model.family);
  out.fault_rate = cfg.get_double("fault_rate", out.fault_rate);
  out.output_dir = cfg.get_or("output_dir", out.output_dir.string());
  out.model.max_inner_folds = static_cast<int>(cfg.get_int("lasso.max_inner_folds", out.model.max_inner_folds));
  out.model.lasso.n_lambda = static_cast<int>(cfg.get_int("lasso.n_lambda", out.model.lasso.n_lambda));
  if (cfg.has("lasso.lambda_min_ratio"))
    out.model.lasso.lambda_min_ratio = cfg.get_double("lasso.lambda_min_ratio", 1e-4);
  out.model.lasso.tolerance = cfg.get_double("lasso.tolerance", out.model.lasso.tolerance);
  out.model.forest.n_trees = static_cast<int>(cfg.get_int("forest.n_trees", out.model.forest.n_trees));
  out.model.forest.mtry = static_cast<int>(cfg.get_int("forest.mtry", out.model.forest.mtry));
  out.model.forest.min_leaf = static_cast<int>(cfg.get_int("forest.min_leaf", out.model.forest.min_leaf));
  out.config_text = cfg.text();
  out.validate();
  return out;
}

void ExperimentConfig::validate() const {
  if (scenarios.empty() || mechanisms.empty() || n_train.empty() || n_junk.empty())
    throw InvalidConfiguration("scenarios, mechanisms, n_train and n_junk must be nonempty");
  if (ks.empty()) throw InvalidConfiguration("ks must be nonempty");
  for (int k : ks)
    if (k < 1) throw InvalidConfiguration("every k must be >= 1");
  auto sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted != ks)
    throw InvalidConfiguration("ks must be strictly increasing");
  if (v < 2) throw InvalidConfiguration("v must be >= 2");
  if (n_replicates < 1) throw InvalidConfiguration("n_replicates must be >= 1");
  if (workers < 1) throw InvalidConfiguration("workers must be >= 1");
  if (!(fault_rate >= 0.0 && fault_rate <= 1.0)) throw InvalidConfiguration("fault_rate must lie in [0, 1]");
  if (!(prop_incomplete >= 0.0 && prop_incomplete <= 1.0))
    throw InvalidConfiguration("prop_incomplete must lie in [0, 1]");
  model.learner();
  for (const auto& s : settings()) {
    if (s.n_train < static_cast<std::size_t>(v))
      throw InvalidConfiguration("n_train " + std::to_string(s.n_train) + " is smaller than v");
    gen_config(s).validate();
  }
}

std::vector<SettingKey> ExperimentConfig::settings() const {
  std::vector<SettingKey> out;
  for (auto s : scenarios)
    for (auto m : mechanisms)
      for (auto n : n_train)
        for (auto j : n_junk)
          out.push_back({std::string(to_string(s)), std::string(to_string(m)), n, j, model.family});
  return out;
}

GenConfig ExperimentConfig::gen_config(const SettingKey& setting) const {
  GenConfig g;
  g.n_train = setting.n_train;
  g.n_valid = n_valid;
  g.n_junk = setting.n_junk;
  g.rho = rho;
  g.sigma_eps = sigma_eps;
  g.scenario = parse_scenario(setting.scenario);
  // One group per CV fold plus the held-out validation group.
  g.n_groups = v + 1;
  g.group_mean_sd = group_mean_sd;
  return g;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, const SettingKey& setting, std::size_t replicate) {
  return mix_seed(mix_seed(base_seed, hash_text(setting.id())), static_cast<std::uint64_t>(replicate));
}

ReplicateRecord run_replicate(const ExperimentConfig& config, const SettingKey& setting, std::size_t replicate) {
  ReplicateRecord rec;
  rec.setting = setting;
  rec.replicate = replicate;
  rec.seed = replicate_seed(config.base_seed, setting, replicate);
  rec.ks = config.ks;

  if (config.fault_rate > 0.0 && Rng(mix_seed(rec.seed, kFaultStream)).uniform() < config.fault_rate)
    throw Error("injected fault (fault_rate = " + format_double(config.fault_rate) + ")");

  const auto gen = config.gen_config(setting);
  auto data = generate(gen, mix_seed(rec.seed, kDataStream));

  AmputeConfig amp;
  amp.patterns = gen_patterns(data.train.predictor_indices().size(), mix_seed(rec.seed, kPatternStream));
  amp.mechanism = parse_mechanism(setting.mechanism);
  amp.prop_incomplete = config.prop_incomplete;
  const Frame train = ampute(data.train, amp, mix_seed(rec.seed, kAmputeTrainStream));
  const Frame valid = ampute(data.valid, amp, mix_seed(rec.seed, kAmputeValidStream));

  const std::uint64_t engine_seed = mix_seed(rec.seed, kEngineStream);
  const FoldPlan plan = gen.scenario == Scenario::S2
                            ? make_folds(train.n_rows(), config.v, plan_seed(engine_seed),
                                         std::span<const int>(*data.train_groups))
                            : make_folds(train.n_rows(), config.v, plan_seed(engine_seed));

  EngineOptions opts;
  opts.learner = config.model.learner();
  const auto during = estimate_during(train, config.ks, plan, engine_seed, opts);
  const auto before = estimate_before(train, config.ks, plan, engine_seed, opts);
  const auto curve = finalize_curve(train, valid, config.ks, engine_seed, opts);

  rec.truth = curve.r2;
  rec.during = during.r2;
  rec.before = before.r2;
  rec.chosen_k_during = choose_k(during);
  rec.chosen_k_before = choose_k(before);
  const auto at_d = find_k(curve.ks, rec.chosen_k_during);
  const auto at_b = find_k(curve.ks, rec.chosen_k_before);
  rec.downstream_during = curve.r2.at(at_d);
  rec.downstream_before = curve.r2.at(at_b);
  rec.lambda_during = curve.lambdas.at(at_d);
  rec.lambda_before = curve.lambdas.at(at_b);

  for (const auto* series : {&rec.truth, &rec.during, &rec.before})
    for (double v : *series)
      if (!std::isfinite(v)) throw NumericError("non-finite R^2 in replicate");

  rec.timing.replicate = replicate;
  rec.timing.impute_during = during.impute_seconds;
  rec.timing.impute_before = before.impute_seconds;
  rec.timing.model_during = during.model_seconds;
  rec.timing.model_before = before.model_seconds;
  rec.timing.final_impute = curve.impute_seconds;
  rec.timing.final_model = curve.model_seconds;
  return rec;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

SimulationRun run_simulation(const ExperimentConfig& config,
                             const std::function<void(const ReplicateRecord&)>& on_done) {
  config.validate();
  struct Task {
    SettingKey setting;
    std::size_t replicate;
  };
  std::vector<Task> tasks;
  for (const auto& s : config.settings()) {
    const std::set<std::size_t>* subset = nullptr;
    if (config.only) {
      const auto it = config.only->find(s.id());
      if (it == config.only->end()) continue;
      subset = &it->second;
    }
    for (std::size_t r = 0; r < config.n_replicates; ++r)
      if (!subset || subset->count(r)) tasks.push_back({s, r});
  }

  std::vector<ReplicateRecord> results(tasks.size());
  std::mutex callback_mutex;
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    const auto& t = tasks[i];
    ReplicateRecord rec;
    try {
      rec = run_replicate(config, t.setting, t.replicate);
    } catch (const std::exception& e) {
      rec = ReplicateRecord{};
      rec.setting = t.setting;
      rec.replicate = t.replicate;
      rec.seed = replicate_seed(config.base_seed, t.setting, t.replicate);
      rec.ks = config.ks;
      rec.status = RecordStatus::failed;
      rec.error = e.what();
      rec.timing.replicate = t.replicate;
    }
    results[i] = std::move(rec);
    if (on_done) {
      std::lock_guard lock(callback_mutex);
      on_done(results[i]);
    }
  });

  SimulationRun run;
  run.scheduled = tasks.size();
  for (const auto& r : results) (r.complete() ? run.completed : run.failed) += 1;
  run.records = group_records(std::move(results));
  return run;
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  const auto probe = dir / ".mdcv_write_probe";
  {
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    if (!out || !(out << "ok")) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

void persist_run(const SimulationRun& run, const std::string& config_text, const fs::path& dir,
                 const std::map<std::string, std::string>& extra) {
  ensure_writable(dir);
  write_records(run.records, dir);

  nlohmann::ordered_json manifest;
  manifest["tool"] = "mdcv";
  manifest["version"] = library_version();
  manifest["config"] = config_text;
  auto settings = nlohmann::ordered_json::array();
  for (const auto& [key, group] : run.records) {
    std::size_t done = 0;
    for (const auto& r : group) done += r.complete() ? 1 : 0;
    nlohmann::ordered_json s;
    s["id"] = key.id();
    s["scheduled"] = group.size();
    s["completed"] = done;
    s["failed"] = group.size() - done;
    settings.push_back(s);
  }
  manifest["settings"] = settings;
  manifest["scheduled"] = run.scheduled;
  manifest["completed"] = run.completed;
  manifest["failed"] = run.failed;
  for (const auto& [k, v] : extra) manifest["extra"][k] = v;

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << manifest.dump(2) << '\n';
}

std::map<std::string, std::set<std::size_t>> failed_replicates(const RecordSet& records) {
  std::map<std::string, std::set<std::size_t>> out;
  for (const auto& [key, group] : records)
    for (const auto& r : group)
      if (!r.complete()) out[key.id()].insert(r.replicate);
  return out;
}

}  // namespace mdcv
