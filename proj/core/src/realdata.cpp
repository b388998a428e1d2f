#include "mdcv/realdata.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "mdcv/cvengine.hpp"
#include "mdcv/emit.hpp"
#include "mdcv/error.hpp"
#include "mdcv/impute.hpp"
#include "mdcv/metrics.hpp"
#include "mdcv/random.hpp"
#include "mdcv/summary.hpp"

namespace mdcv {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kAmputeTrainStream = 3;
constexpr std::uint64_t kAmputeTestStream = 4;
constexpr std::uint64_t kEngineStream = 5;

constexpr std::array<std::string_view, 19> kKnownKeys = {
    "n_replicates", "base_seed", "workers", "train_fraction", "ks", "v", "models", "mechanism",
    "prop_incomplete", "amputate", "lump_threshold", "log_outcome", "output_dir", "lasso.max_inner_folds",
    "lasso.n_lambda", "lasso.tolerance", "forest.n_trees", "forest.mtry", "forest.min_leaf"};

std::uint64_t realdata_seed(std::uint64_t base_seed, std::size_t replicate) {
  return mix_seed(mix_seed(base_seed, hash_text("real")), static_cast<std::uint64_t>(replicate));
}

std::string cell(const std::vector<std::string>& row, std::size_t j) { return std::string(trim(row[j])); }

}  // namespace

DataSchema DataSchema::from_config(const Config& cfg) {
  DataSchema s;
  s.outcome = cfg.get("outcome");
  for (const auto& key : cfg.keys()) {
    if (key == "outcome") continue;
    if (key.rfind("columns.", 0) == 0) {
      const auto name = key.substr(8);
      const auto& kind = cfg.get(key);
      if (kind != "numeric" && kind != "nominal")
        throw InvalidConfiguration("column '" + name + "': kind must be numeric or nominal, got '" + kind + "'");
      if (name == s.outcome) throw InvalidConfiguration("outcome '" + name + "' must not be listed as a predictor");
      s.columns.emplace_back(name, kind == "numeric" ? ColumnKind::numeric : ColumnKind::nominal);
    } else if (key.rfind("prototypes.", 0) == 0) {
      s.prototypes.emplace_back(key.substr(11), split_list(cfg.get(key)));
    } else {
      throw InvalidConfiguration("unknown schema key '" + key + "'");
    }
  }
  if (s.columns.empty()) throw InvalidConfiguration("schema declares no predictor columns");
  for (const auto& [name, cols] : s.prototypes) {
    if (cols.empty()) throw InvalidConfiguration("prototype '" + name + "' has no columns");
    for (const auto& c : cols) {
      const bool known = std::any_of(s.columns.begin(), s.columns.end(), [&](const auto& d) { return d.first == c; });
      if (!known) throw InvalidConfiguration("prototype '" + name + "' names undeclared column '" + c + "'");
    }
  }
  return s;
}

DataSchema DataSchema::load(const fs::path& path) { return from_config(Config::load(path)); }

std::vector<MdPattern> DataSchema::patterns() const {
  std::vector<MdPattern> out;
  for (const auto& [name, cols] : prototypes) {
    MdPattern p;
    p.mask.assign(columns.size(), 0);
    for (const auto& c : cols)
      for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j].first == c) p.mask[j] = 1;
    try {
      p.validate();
    } catch (const InvalidConfiguration& e) {
      throw InvalidConfiguration("prototype '" + name + "': " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

LoadedData load_dataset(const CsvTable& table, const DataSchema& schema) {
  const std::size_t y_col = table.column(schema.outcome);
  std::vector<std::size_t> src;
  for (const auto& [name, kind] : schema.columns) src.push_back(table.column(name));

  LoadedData out;
  out.rows_read = table.rows.size() + table.rejected_lines.size();
  out.rejected_parse = table.rejected_lines.size();

  std::vector<double> y;
  std::vector<std::vector<double>> num(src.size());
  std::vector<std::vector<std::string>> raw(src.size());
  for (const auto& row : table.rows) {
    bool missing = is_missing_marker(row[y_col]);
    for (std::size_t j = 0; j < src.size() && !missing; ++j) missing = is_missing_marker(row[src[j]]);
    if (missing) {
      ++out.rejected_missing;
      continue;
    }
    double yv = 0.0;
    std::vector<double> vals(src.size(), 0.0);
    bool ok = true;
    try {
      yv = parse_double(row[y_col], schema.outcome);
      for (std::size_t j = 0; j < src.size(); ++j)
        if (schema.columns[j].second == ColumnKind::numeric) vals[j] = parse_double(row[src[j]], schema.columns[j].first);
    } catch (const InvalidConfiguration&) {
      ok = false;
    }
    if (!ok || !std::isfinite(yv)) {
      ++out.rejected_parse;
      continue;
    }
    y.push_back(yv);
    for (std::size_t j = 0; j < src.size(); ++j) {
      if (schema.columns[j].second == ColumnKind::numeric) num[j].push_back(vals[j]);
      else raw[j].push_back(cell(row, src[j]));
    }
  }
  if (y.size() < 4) throw SchemaError("fewer than 4 usable rows in the data file");

  std::vector<Column> cols;
  cols.push_back(Column::numeric(schema.outcome, y));
  for (std::size_t j = 0; j < src.size(); ++j) {
    const auto& name = schema.columns[j].first;
    if (schema.columns[j].second == ColumnKind::numeric) {
      cols.push_back(Column::numeric(name, num[j]));
      continue;
    }
    std::vector<std::string> levels = raw[j];
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::int32_t> codes;
    codes.reserve(raw[j].size());
    for (const auto& v : raw[j])
      codes.push_back(static_cast<std::int32_t>(std::lower_bound(levels.begin(), levels.end(), v) - levels.begin()));
    cols.push_back(Column::nominal(name, levels, codes));
  }
  out.frame = Frame(std::move(cols), schema.outcome);
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(std::size_t n, double train_fraction,
                                                                               std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidConfiguration("train_fraction must lie strictly between 0 and 1");
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train < 2 || n_train + 2 > n) throw InvalidConfiguration("split leaves fewer than 2 rows on one side");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

std::vector<std::string> lump_levels(Frame& train, Frame& test, double threshold) {
  if (!train.same_schema(test)) throw SchemaError("training and test frames differ in schema");
  std::vector<std::string> lumped;
  std::vector<Column> train_cols = train.columns(), test_cols = test.columns();
  for (std::size_t j : train.predictor_indices()) {
    const Column& col = train_cols[j];
    if (!col.is_nominal()) continue;
    std::vector<std::size_t> count(col.levels().size(), 0);
    std::size_t observed = 0;
    for (std::size_t i = 0; i < col.size(); ++i)
      if (col.observed(i)) ++count[static_cast<std::size_t>(col.code(i))], ++observed;
    if (observed == 0) continue;
    std::vector<bool> rare(count.size());
    std::size_t n_rare = 0;
    for (std::size_t l = 0; l < count.size(); ++l) {
      rare[l] = static_cast<double>(count[l]) < threshold * static_cast<double>(observed);
      n_rare += rare[l] ? 1 : 0;
    }
    if (n_rare < 2) continue;

    std::vector<std::string> levels;
    std::vector<std::int32_t> remap(count.size());
    for (std::size_t l = 0; l < count.size(); ++l)
      if (!rare[l]) {
        remap[l] = static_cast<std::int32_t>(levels.size());
        levels.push_back(col.levels()[l]);
      }
    auto other = std::find(levels.begin(), levels.end(), "other");
    std::int32_t other_code = static_cast<std::int32_t>(other - levels.begin());
    if (other == levels.end()) levels.push_back("other");
    for (std::size_t l = 0; l < count.size(); ++l)
      if (rare[l]) remap[l] = other_code;

    auto rebuild = [&](const Column& c) {
      std::vector<std::int32_t> codes(c.size(), 0);
      std::vector<std::uint8_t> obs(c.size(), 0);
      for (std::size_t i = 0; i < c.size(); ++i)
        if (c.observed(i)) codes[i] = remap[static_cast<std::size_t>(c.code(i))], obs[i] = 1;
      return Column::nominal(c.name(), levels, codes, obs);
    };
    train_cols[j] = rebuild(train_cols[j]);
    test_cols[j] = rebuild(test_cols[j]);
    lumped.push_back(col.name());
  }
  const auto train_ids = train.row_ids();
  const auto test_ids = test.row_ids();
  train = Frame(std::move(train_cols), train.outcome_name());
  test = Frame(std::move(test_cols), test.outcome_name());
  train.set_row_ids(train_ids);
  test.set_row_ids(test_ids);
  return lumped;
}

void log_outcome(Frame& frame) {
  const auto j = frame.outcome_index();
  if (!j) throw SchemaError("frame has no outcome column");
  Column& y = frame.mutable_column(*j);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.missing(i)) continue;
    if (!(y.value(i) > 0.0)) throw NumericError("log transform needs a positive outcome, row " + std::to_string(i));
    y.set_value(i, std::log(y.value(i)));
  }
}

RealDataConfig::RealDataConfig() {
  for (int k = 1; k <= 35; ++k) ks.push_back(k);
  ModelSpec ols;
  ols.family = "ols";
  ModelSpec forest;
  forest.family = "forest";
  models = {ols, forest};
}

RealDataConfig RealDataConfig::from_config(const Config& cfg) {
  cfg.require_known(kKnownKeys);
  RealDataConfig out;
  const auto reps = cfg.get_int("n_replicates", static_cast<std::int64_t>(out.n_replicates));
  if (reps < 1) throw InvalidConfiguration("n_replicates must be >= 1");
  out.n_replicates = static_cast<std::size_t>(reps);
  out.base_seed = cfg.get_u64("base_seed", out.base_seed);
  out.workers = static_cast<int>(cfg.get_int("workers", out.workers));
  out.train_fraction = cfg.get_double("train_fraction", out.train_fraction);
  out.ks = cfg.get_int_list("ks", out.ks);
  out.v = static_cast<int>(cfg.get_int("v", out.v));
  out.mechanism = parse_mechanism(cfg.get_or("mechanism", "MAR"));
  out.prop_incomplete = cfg.get_double("prop_incomplete", out.prop_incomplete);
  out.amputate = cfg.get_bool("amputate", out.amputate);
  out.lump_threshold = cfg.get_double("lump_threshold", out.lump_threshold);
  out.log_outcome = cfg.get_bool("log_outcome", out.log_outcome);
  out.output_dir = cfg.get_or("output_dir", out.output_dir.string());
  ModelSpec base;
  base.max_inner_folds = static_cast<int>(cfg.get_int("lasso.max_inner_folds", base.max_inner_folds));
  base.lasso.n_lambda = static_cast<int>(cfg.get_int("lasso.n_lambda", base.lasso.n_lambda));
  base.lasso.tolerance = cfg.get_double("lasso.tolerance", base.lasso.tolerance);
  base.forest.n_trees = static_cast<int>(cfg.get_int("forest.n_trees", base.forest.n_trees));
  base.forest.mtry = static_cast<int>(cfg.get_int("forest.mtry", base.forest.mtry));
  base.forest.min_leaf = static_cast<int>(cfg.get_int("forest.min_leaf", base.forest.min_leaf));
  out.models.clear();
  for (const auto& family : cfg.get_list("models", {"ols", "forest"})) {
    ModelSpec m = base;
    m.family = family;
    out.models.push_back(m);
  }
  out.config_text = cfg.text();
  out.validate();
  return out;
}

void RealDataConfig::validate() const {
  if (ks.empty()) throw InvalidConfiguration("ks must be nonempty");
  auto sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != ks || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || ks.front() < 1)
    throw InvalidConfiguration("ks must be strictly increasing positive integers");
  if (v < 2) throw InvalidConfiguration("v must be >= 2");
  if (workers < 1) throw InvalidConfiguration("workers must be >= 1");
  if (models.empty()) throw InvalidConfiguration("models must be nonempty");
  for (const auto& m : models) m.learner();
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidConfiguration("train_fraction must lie strictly between 0 and 1");
  if (!(prop_incomplete >= 0.0 && prop_incomplete <= 1.0))
    throw InvalidConfiguration("prop_incomplete must lie in [0, 1]");
  if (!(lump_threshold >= 0.0 && lump_threshold < 1.0)) throw InvalidConfiguration("lump_threshold must lie in [0, 1)");
}

RealDataRun run_realdata(const LoadedData& data, const DataSchema& schema, const RealDataConfig& config) {
  config.validate();
  const auto patterns = schema.patterns();
  if (config.amputate && patterns.empty()) throw InvalidConfiguration("amputation needs at least one prototype");

  RealDataRun out;
  out.rows_read = data.rows_read;
  out.rows_used = data.frame.n_rows();
  out.rejected_parse = data.rejected_parse;
  out.rejected_missing = data.rejected_missing;
  const auto n_train = static_cast<std::size_t>(
      std::llround(config.train_fraction * static_cast<double>(data.frame.n_rows())));
  out.n_train = n_train;
  out.n_test = data.frame.n_rows() - n_train;
  const std::string mech = config.amputate ? std::string(to_string(config.mechanism)) : "none";
  auto key_for = [&](const ModelSpec& m) { return SettingKey{"real", mech, n_train, 0, m.family}; };

  std::vector<std::vector<ReplicateRecord>> results(config.n_replicates);
  parallel_for(config.n_replicates, config.workers, [&](std::size_t r) {
    const auto seed = realdata_seed(config.base_seed, r);
    auto fail_all = [&](const std::string& why) {
      results[r].clear();
      for (const auto& m : config.models) {
        ReplicateRecord rec;
        rec.setting = key_for(m);
        rec.replicate = r;
        rec.seed = seed;
        rec.ks = config.ks;
        rec.status = RecordStatus::failed;
        rec.error = why;
        rec.timing.replicate = r;
        results[r].push_back(std::move(rec));
      }
    };
    try {
      const auto [tr, te] = train_test_split(data.frame.n_rows(), config.train_fraction, mix_seed(seed, kSplitStream));
      Frame train = data.frame.take_rows(tr);
      Frame test = data.frame.take_rows(te);
      if (config.log_outcome) {
        log_outcome(train);
        log_outcome(test);
      }
      lump_levels(train, test, config.lump_threshold);
      if (config.amputate) {
        AmputeConfig amp;
        amp.patterns = patterns;
        amp.mechanism = config.mechanism;
        amp.prop_incomplete = config.prop_incomplete;
        train = ampute(train, amp, mix_seed(seed, kAmputeTrainStream));
        test = ampute(test, amp, mix_seed(seed, kAmputeTestStream));
      }
      const auto engine_seed = mix_seed(seed, kEngineStream);
      const auto plan = make_folds(train.n_rows(), config.v, plan_seed(engine_seed));
      const auto y_test = test.outcome();

      for (const auto& m : config.models) {
        ReplicateRecord rec;
        rec.setting = key_for(m);
        rec.replicate = r;
        rec.seed = seed;
        rec.ks = config.ks;
        EngineOptions opts;
        opts.learner = m.learner();
        const auto during = estimate_during(train, config.ks, plan, engine_seed, opts);
        const auto before = estimate_before(train, config.ks, plan, engine_seed, opts);
        const auto curve = finalize_curve(train, test, config.ks, engine_seed, opts);
        rec.truth = curve.r2;
        rec.during = during.r2;
        rec.before = before.r2;
        rec.chosen_k_during = choose_k(during);
        rec.chosen_k_before = choose_k(before);
        const auto at = [&](int k) {
          return static_cast<std::size_t>(std::find(curve.ks.begin(), curve.ks.end(), k) - curve.ks.begin());
        };
        rec.downstream_during = curve.r2.at(at(rec.chosen_k_during));
        rec.downstream_before = curve.r2.at(at(rec.chosen_k_before));
        rec.lambda_during = curve.lambdas.at(at(rec.chosen_k_during));
        rec.lambda_before = curve.lambdas.at(at(rec.chosen_k_before));

        const auto simple = SimpleImputer::fit(train);
        const auto model = opts.learner(simple.transform(train), final_model_seed(engine_seed));
        rec.baseline = r_squared(y_test, model.predict(simple.transform(test)));

        rec.timing.replicate = r;
        rec.timing.impute_during = during.impute_seconds;
        rec.timing.impute_before = before.impute_seconds;
        rec.timing.model_during = during.model_seconds;
        rec.timing.model_before = before.model_seconds;
        rec.timing.final_impute = curve.impute_seconds;
        rec.timing.final_model = curve.model_seconds;
        results[r].push_back(std::move(rec));
      }
    } catch (const std::exception& e) {
      fail_all(e.what());
    }
  });

  std::vector<ReplicateRecord> flat;
  for (auto& group : results)
    for (auto& rec : group) {
      (rec.complete() ? out.run.completed : out.run.failed) += 1;
      flat.push_back(std::move(rec));
    }
  out.run.scheduled = flat.size();
  out.run.records = group_records(std::move(flat));
  return out;
}

RealDataRun run_realdata(const fs::path& csv_path, const fs::path& schema_path, const RealDataConfig& config) {
  config.validate();
  ensure_writable(config.output_dir);
  const auto schema = DataSchema::load(schema_path);
  schema.patterns();
  const auto data = load_dataset(read_csv(csv_path), schema);
  auto result = run_realdata(data, schema, config);

  const std::map<std::string, std::string> extra = {
      {"rows_read", std::to_string(result.rows_read)},
      {"rows_used", std::to_string(result.rows_used)},
      {"rows_rejected_parse", std::to_string(result.rejected_parse)},
      {"rows_rejected_missing", std::to_string(result.rejected_missing)},
      {"n_train", std::to_string(result.n_train)},
      {"n_test", std::to_string(result.n_test)}};
  persist_run(result.run, config.config_text, config.output_dir, extra);
  const auto summary = summarize(result.run.records);
  emit_outputs(summary, result.run.records, config.output_dir / "tables", config.config_text, extra);
  return result;
}

}  // namespace mdcv
