#include "thinkbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "thinkbench/errors.hpp"

namespace thinkbench {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string fixed(double v, int places = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp, const char* fmt) {
  std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

std::string model_name(const RunConfig& c, const Backend& backend) {
  if (c.backend.kind == BackendKind::kWire) return c.backend.model_id;
  return c.backend.model_id.empty() ? backend.identity() : c.backend.model_id;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string pad(const std::string& s, std::size_t width, bool right = false) {
  if (s.size() >= width) return s;
  std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

// Plain-text table with a header rule.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += "  ";
      s += pad(cells[i], width[i], i > 1);
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
  spec.validate();
  sampling.validate();
  backend.validate();
  if (bounds) bounds->validate();
  if (!(abort_failure_fraction >= 0.0 && abort_failure_fraction <= 1.0)) {
    throw ConfigError("abort failure fraction must lie in [0, 1]");
  }
  if (tolerance.abs_tol < 0 || tolerance.rel_tol < 0 || tolerance.round_places < 0) {
    throw ConfigError("tolerances must be non-negative");
  }
  for (auto t : spec.tasks) {
    if (!templates.contains(t)) throw ConfigError("no prompt template for task " + std::string(task_name(t)));
  }
  if (run_id.find('/') != std::string::npos || run_id == "." || run_id == "..") {
    throw ConfigError("run id must be a plain directory name");
  }
}

NormalizationBounds RunConfig::effective_bounds() const {
  if (bounds) return *bounds;
  return NormalizationBounds{0.0, static_cast<double>(sampling.max_tokens)};
}

ojson RunConfig::to_json() const {
  ojson j;
  ojson tasks = ojson::array();
  for (auto t : spec.tasks) tasks.push_back(std::string(task_name(t)));
  j["tasks"] = tasks;
  j["datapoints"] = spec.datapoints;
  j["folds"] = spec.folds;
  j["range"] = {spec.range.min, spec.range.max};
  j["list_sizes"] = spec.list_sizes;
  j["seed"] = spec.seed ? ojson(*spec.seed) : ojson(nullptr);
  j["temperature"] = sampling.temperature;
  j["top_p"] = sampling.top_p;
  j["max_tokens"] = sampling.max_tokens;
  ojson b;
  b["kind"] = backend.kind == BackendKind::kWire ? "wire" : "mock";
  b["endpoint"] = backend.endpoint;
  b["model_id"] = backend.model_id;
  b["api_key_env"] = backend.api_key_env;
  b["timeout_ms"] = backend.timeout.count();
  b["max_retries"] = backend.max_retries;
  b["max_in_flight"] = backend.max_in_flight;
  b["system_prompt"] = backend.system_prompt ? ojson(*backend.system_prompt) : ojson(nullptr);
  b["tokenizer"] = backend.tokenizer_id ? ojson(*backend.tokenizer_id) : ojson(nullptr);
  if (backend.kind == BackendKind::kMock) {
    ojson m;
    m["script"] = std::string(mock_script_name(mock.script));
    m["pad_factor"] = mock.pad_factor;
    m["fail_rate"] = mock.fail_rate;
    m["fail_seed"] = mock.fail_seed;
    m["transient_failures"] = mock.transient_failures;
    b["mock"] = m;
  }
  j["backend"] = b;
  auto nb = effective_bounds();
  j["bounds"] = {{"t_min", nb.t_min}, {"t_max", nb.t_max}};
  j["tolerance"] = {{"abs_tol", tolerance.abs_tol},
                    {"rel_tol", tolerance.rel_tol},
                    {"round_places", tolerance.round_places}};
  j["store_details"] = store_details;
  j["output_dir"] = output_dir.string();
  j["run_id"] = run_id;
  j["templates_path"] = templates_path ? ojson(*templates_path) : ojson(nullptr);
  j["templates"] = ojson::parse(templates.to_json())["templates"];
  return j;
}

// ---------------------------------------------------------------------------
// ReportBundle

double ReportBundle::efficiency_score() const {
  if (tasks.empty()) return 0.0;
  double s = 0;
  for (const auto& t : tasks) s += t.overthinking_score;
  return s / static_cast<double>(tasks.size());
}

double ReportBundle::efficiency_score_of_means() const {
  if (tasks.empty()) return 0.0;
  double a = 0, e = 0;
  for (const auto& t : tasks) {
    a += t.accuracy.mean;
    e += t.token_efficiency;
  }
  double n = static_cast<double>(tasks.size());
  return overthinking_score(a / n, e / n);
}

// ---------------------------------------------------------------------------
// Evaluation

ReportBundle run_evaluation(const RunConfig& config, Backend* backend, const ProgressFn& progress,
                            const LogFn& log) {
  config.validate();
  auto started = std::chrono::system_clock::now();
  auto clock0 = std::chrono::steady_clock::now();

  std::unique_ptr<Backend> owned;
  if (!backend) {
    owned = make_backend(config.backend, config.mock);
    backend = owned.get();
  }

  ReportBundle bundle;
  bundle.store_details = config.store_details;
  auto emit = [&](const std::string& line) {
    bundle.log.push_back(line);
    if (log) log(line);
  };

  Dataset dataset = generate_dataset(config.spec);
  bundle.meta.run_id = config.run_id;
  bundle.meta.effective_seed = dataset.seed;
  bundle.meta.backend_identity = backend->identity();
  bundle.meta.model = model_name(config, *backend);
  bundle.meta.started_at = utc_timestamp(started, "%Y-%m-%dT%H:%M:%SZ");
  bundle.config_echo = config.to_json();
  bundle.config_echo["effective_seed"] = dataset.seed;
  if (config.store_details) bundle.dataset_jsonl = serialize_dataset(dataset);

  const auto bounds = config.effective_bounds();
  emit("seed " + std::to_string(dataset.seed) + ", backend " + bundle.meta.backend_identity);

  for (const auto& [key, folds] : dataset.entries) {
    std::vector<FoldMetrics> fold_results;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto& instances = folds[f];
      std::vector<CompletionRequest> requests;
      requests.reserve(instances.size());
      for (const auto& inst : instances) {
        requests.push_back(CompletionRequest{render_prompt(inst, config.templates), config.sampling, &inst});
      }
      auto outcomes = complete_batch(requests, *backend, config.backend);

      std::vector<SampleRecord> records;
      records.reserve(instances.size());
      for (std::size_t i = 0; i < instances.size(); ++i) {
        if (auto* resp = std::get_if<ModelResponse>(&outcomes[i])) {
          records.push_back(score_response(instances[i], *resp, config.tolerance));
        } else {
          records.push_back(failed_record(instances[i], std::get<RequestFailure>(outcomes[i])));
        }
      }
      FoldMetrics fm = fold_metrics(records);
      bundle.meta.samples += fm.sample_count;
      bundle.meta.failures += fm.failures;
      emit(key.label() + " fold " + std::to_string(f + 1) + "/" + std::to_string(folds.size()) + ": " +
           std::to_string(fm.sample_count) + " samples, accuracy " + fixed(fm.accuracy) +
           ", instruction following " + fixed(fm.instruction_following) + ", tokens " +
           fixed(fm.mean_tokens, 1) + ", failures " + std::to_string(fm.failures));
      for (const auto& r : records) {
        if (r.failure) {
          emit("  request " + key.label() + "#" + std::to_string(r.fold) + "." + std::to_string(r.index) +
               " failed (" + std::string(failure_kind_name(r.failure->kind)) + "): " + r.failure->message);
        }
      }
      if (config.store_details) {
        for (auto& r : records) bundle.details.push_back(std::move(r));
      }
      fold_results.push_back(fm);
      if (progress) progress(ProgressEvent{key, static_cast<int>(f), static_cast<int>(folds.size()), &fm});

      if (fm.failures > config.abort_failure_fraction * fm.sample_count) {
        bundle.meta.aborted = true;
        bundle.meta.abort_reason = std::to_string(fm.failures) + " of " + std::to_string(fm.sample_count) +
                                   " requests failed in " + key.label() + " fold " +
                                   std::to_string(f + 1);
        emit("aborting: " + bundle.meta.abort_reason);
        break;
      }
    }
    bundle.tasks.push_back(aggregate_folds(key, fold_results, bounds));
    if (bundle.meta.aborted) break;
  }

  bundle.meta.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  emit("done: " + std::to_string(bundle.meta.samples) + " samples, " + std::to_string(bundle.meta.failures) +
       " failures, efficiency score " + fixed(bundle.efficiency_score()));
  return bundle;
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  fs::path probe = dir / ".thinkbench-write-probe";
  {
    std::ofstream out(probe, std::ios::trunc);
    if (!out || !(out << "ok") || (out.close(), !out)) {
      throw IoError("directory " + dir.string() + " is not writable");
    }
  }
  fs::remove(probe, ec);
}

fs::path resolve_run_dir(RunConfig& config) {
  if (config.run_id.empty()) {
    config.run_id = "run-" + utc_timestamp(std::chrono::system_clock::now(), "%Y%m%d-%H%M%S");
    std::string base = config.run_id;
    for (int k = 2; fs::exists(config.output_dir / config.run_id); ++k) {
      config.run_id = base + "-" + std::to_string(k);
    }
  }
  return config.output_dir / config.run_id;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

const char* kTierKeys[5] = {"boxed", "explicit", "contextual", "fallback", "none"};

ojson tiers_json(const TierCounts& t) {
  ojson j;
  for (std::size_t i = 0; i < t.size(); ++i) j[kTierKeys[i]] = t[i];
  return j;
}

}  // namespace

ojson summary_json(const ReportBundle& b) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["run_id"] = b.meta.run_id;
  j["model"] = b.meta.model;
  j["backend"] = b.meta.backend_identity;
  j["seed"] = b.meta.effective_seed;

  double n = static_cast<double>(std::max<std::size_t>(1, b.tasks.size()));
  double acc = 0, ifr = 0, tok = 0, wrd = 0, chr = 0, eff = 0, trn = 0;
  for (const auto& t : b.tasks) {
    acc += t.accuracy.mean;
    ifr += t.instruction_following.mean;
    tok += t.tokens.mean;
    wrd += t.words.mean;
    chr += t.chars.mean;
    eff += t.token_efficiency;
    trn += t.truncated_fraction.mean;
  }
  ojson overall;
  overall["accuracy"] = acc / n;
  overall["instruction_following"] = ifr / n;
  overall["efficiency_score"] = b.efficiency_score();
  overall["tokens_avg"] = tok / n;
  overall["words_avg"] = wrd / n;
  overall["chars_avg"] = chr / n;
  overall["efficiency_score_of_means"] = b.efficiency_score_of_means();
  overall["token_efficiency"] = eff / n;
  overall["truncated_fraction"] = trn / n;
  overall["samples"] = b.meta.samples;
  overall["failures"] = b.meta.failures;
  j["overall"] = overall;

  ojson tasks = ojson::array();
  for (const auto& t : b.tasks) {
    ojson e;
    e["task"] = std::string(task_name(t.key.task));
    e["config"] = t.key.config_label();
    e["accuracy"] = t.accuracy.mean;
    e["instruction_following"] = t.instruction_following.mean;
    e["efficiency_score"] = t.overthinking_score;
    e["tokens_avg"] = t.tokens.mean;
    e["words_avg"] = t.words.mean;
    e["chars_avg"] = t.chars.mean;
    e["accuracy_std"] = t.accuracy.std;
    e["instruction_following_std"] = t.instruction_following.std;
    e["tokens_std"] = t.tokens.std;
    e["words_std"] = t.words.std;
    e["chars_std"] = t.chars.std;
    e["token_efficiency"] = t.token_efficiency;
    e["bounds"] = {{"mode", "configured"}, {"t_min", t.bounds.t_min}, {"t_max", t.bounds.t_max}};
    e["truncated_fraction"] = t.truncated_fraction.mean;
    e["folds"] = t.folds;
    e["samples"] = t.sample_count;
    e["failures"] = t.failures;
    e["tiers"] = tiers_json(t.tiers);
    tasks.push_back(e);
  }
  j["tasks"] = tasks;
  j["run"] = {{"started_at", b.meta.started_at},
              {"wall_clock_s", b.meta.wall_clock_s},
              {"aborted", b.meta.aborted},
              {"abort_reason", b.meta.abort_reason}};
  return j;
}

std::string tasks_csv(const ReportBundle& b) {
  std::string out =
      "schema_version,task,config,accuracy,instruction_following,efficiency_score,tokens_avg,words_avg,"
      "chars_avg,accuracy_std,instruction_following_std,tokens_std,words_std,chars_std,token_efficiency,"
      "truncated_fraction,folds,samples,failures\n";
  for (const auto& t : b.tasks) {
    std::vector<std::string> cells = {
        std::to_string(kReportSchemaVersion),
        std::string(task_name(t.key.task)),
        t.key.config_label(),
        fixed(t.accuracy.mean, 6),
        fixed(t.instruction_following.mean, 6),
        fixed(t.overthinking_score, 6),
        fixed(t.tokens.mean, 3),
        fixed(t.words.mean, 3),
        fixed(t.chars.mean, 3),
        fixed(t.accuracy.std, 6),
        fixed(t.instruction_following.std, 6),
        fixed(t.tokens.std, 3),
        fixed(t.words.std, 3),
        fixed(t.chars.std, 3),
        fixed(t.token_efficiency, 6),
        fixed(t.truncated_fraction.mean, 6),
        std::to_string(t.folds),
        std::to_string(t.sample_count),
        std::to_string(t.failures),
    };
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  }
  return out;
}

std::string summary_text(const ReportBundle& b) {
  std::ostringstream out;
  out << "thinkbench report (schema " << kReportSchemaVersion << ")\n";
  out << "run " << b.meta.run_id << "  model " << b.meta.model << "  seed " << b.meta.effective_seed << "\n";
  if (!b.tasks.empty()) {
    const auto& nb = b.tasks.front().bounds;
    out << "token bounds [" << fixed(nb.t_min, 0) << ", " << fixed(nb.t_max, 0) << "]\n";
  }
  out << "\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : b.tasks) {
    rows.push_back({
        std::string(task_name(t.key.task)),
        t.key.config_label(),
        fixed(100 * t.accuracy.mean, 2) + " ± " + fixed(100 * t.accuracy.std, 2),
        fixed(100 * t.instruction_following.mean, 2),
        fixed(t.overthinking_score, 4),
        fixed(t.tokens.mean, 1),
        fixed(t.words.mean, 1),
        fixed(t.chars.mean, 1),
        fixed(100 * t.truncated_fraction.mean, 1),
        std::to_string(t.failures),
    });
  }
  out << render_table({"Task", "Config", "Accuracy %", "Instr. Following %", "Efficiency Score", "Tokens",
                       "Words", "Chars", "Truncated %", "Failures"},
                      rows);
  auto s = summary_json(b)["overall"];
  out << "\n";
  out << "Accuracy (Avg)               " << fixed(100 * s["accuracy"].get<double>(), 2) << "%\n";
  out << "Instruction Following (Avg)  " << fixed(100 * s["instruction_following"].get<double>(), 2) << "%\n";
  out << "Efficiency Score (Avg)       " << fixed(s["efficiency_score"].get<double>(), 4) << "\n";
  out << "Efficiency Score (of means)  " << fixed(s["efficiency_score_of_means"].get<double>(), 4) << "\n";
  out << "Tokens (Avg)                 " << fixed(s["tokens_avg"].get<double>(), 1) << "\n";
  out << "Words (Avg)                  " << fixed(s["words_avg"].get<double>(), 1) << "\n";
  out << "Chars (Avg)                  " << fixed(s["chars_avg"].get<double>(), 1) << "\n";
  out << "Samples " << b.meta.samples << ", failures " << b.meta.failures << "\n";
  if (b.meta.aborted) out << "ABORTED: " << b.meta.abort_reason << "\n";
  return out.str();
}

ojson record_to_json(const SampleRecord& r) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["task"] = std::string(task_name(r.task));
  j["config"] = r.key().config_label();
  j["fold"] = r.fold;
  j["index"] = r.index;
  j["correct"] = r.correct;
  j["instruction_followed"] = r.instruction_followed;
  if (r.parsed) {
    j["parsed"] = answer_to_json(r.parsed->value);
    j["tier"] = std::string(tier_name(r.parsed->tier));
    j["span"] = r.parsed->raw_span;
  } else {
    j["parsed"] = nullptr;
    j["tier"] = nullptr;
    j["span"] = nullptr;
  }
  ojson rejected = ojson::array();
  for (const auto& [tier, reason] : r.rejected) {
    rejected.push_back({{"tier", std::string(tier_name(tier))}, {"reason", std::string(reason_name(reason))}});
  }
  j["rejected"] = rejected;
  j["tokens"] = r.tokens;
  j["token_source"] = std::string(token_source_name(r.token_source));
  j["words"] = r.words;
  j["chars"] = r.chars;
  j["truncated"] = r.truncated;
  j["attempts"] = r.attempts;
  if (r.failure) {
    j["failure"] = {{"kind", std::string(failure_kind_name(r.failure->kind))}, {"message", r.failure->message}};
  } else {
    j["failure"] = nullptr;
  }
  j["response"] = r.response_text;
  return j;
}

std::vector<fs::path> write_reports(const ReportBundle& b, const fs::path& run_dir) {
  ensure_writable(run_dir);
  std::vector<fs::path> written;
  auto put = [&](const char* name, const std::string& content) {
    write_file(run_dir / name, content);
    written.push_back(run_dir / name);
  };
  ojson config;
  config["schema_version"] = kReportSchemaVersion;
  config["config"] = b.config_echo;
  config["run"] = {{"run_id", b.meta.run_id},
                   {"effective_seed", b.meta.effective_seed},
                   {"backend", b.meta.backend_identity},
                   {"model", b.meta.model},
                   {"started_at", b.meta.started_at},
                   {"wall_clock_s", b.meta.wall_clock_s}};
  put("config.json", config.dump(2) + "\n");
  put("summary.json", summary_json(b).dump(2) + "\n");
  put("tasks.csv", tasks_csv(b));
  put("summary.txt", summary_text(b));
  std::string log = "# thinkbench run log (schema " + std::to_string(kReportSchemaVersion) + ")\n";
  for (const auto& line : b.log) log += line + "\n";
  put("run.log", log);
  if (b.store_details) {
    std::string details;
    for (const auto& r : b.details) details += record_to_json(r).dump() + "\n";
    put("details.jsonl", details);
    put("dataset.jsonl", b.dataset_jsonl);
  }
  return written;
}

ReportBundle run_and_report(RunConfig config, Backend* backend, const ProgressFn& progress,
                            const LogFn& log) {
  config.validate();
  fs::path run_dir = resolve_run_dir(config);
  ensure_writable(run_dir);
  ReportBundle bundle = run_evaluation(config, backend, progress, log);
  write_reports(bundle, run_dir);
  if (bundle.meta.aborted) {
    throw BackendError("run aborted (" + bundle.meta.abort_reason + "); partial reports in " + run_dir.string(),
                       false);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Leaderboard

ModelSummary load_summary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError(path.string() + " is not a JSON summary");
  if (j.value("schema_version", 0) != kReportSchemaVersion) {
    throw ConfigError(path.string() + ": unsupported summary schema version");
  }
  ModelSummary m;
  m.source = path.string();
  m.model = j.value("model", std::string());
  if (m.model.empty()) m.model = path.parent_path().filename().string();
  if (!j.contains("tasks") || !j["tasks"].is_array()) throw ConfigError(path.string() + " has no task list");
  try {
    for (const auto& t : j["tasks"]) {
      TaskEntry e;
      e.label = t.at("task").get<std::string>() + "/" + t.at("config").get<std::string>();
      e.accuracy = t.at("accuracy").get<double>();
      e.instruction_following = t.at("instruction_following").get<double>();
      e.tokens_avg = t.at("tokens_avg").get<double>();
      e.words_avg = t.at("words_avg").get<double>();
      e.chars_avg = t.at("chars_avg").get<double>();
      m.tasks.push_back(e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(path.string() + ": malformed task entry: " + ex.what());
  }
  return m;
}

Leaderboard compare_summaries(const std::vector<ModelSummary>& models) {
  if (models.empty()) throw ConfigError("nothing to compare");
  Leaderboard lb;
  std::set<std::string> common;
  for (const auto& t : models.front().tasks) common.insert(t.label);
  std::set<std::string> all = common;
  for (const auto& m : models) {
    std::set<std::string> mine;
    for (const auto& t : m.tasks) mine.insert(t.label);
    all.insert(mine.begin(), mine.end());
    std::set<std::string> keep;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                          std::inserter(keep, keep.end()));
    common = std::move(keep);
  }
  if (common.empty()) throw ConfigError("the summaries share no task configuration");
  for (const auto& label : all) {
    if (!common.count(label)) lb.warnings.push_back("task " + label + " is missing from some summaries; skipped");
  }
  lb.tasks.assign(common.begin(), common.end());

  // entry[m][k] for model m, compared task k
  std::vector<std::vector<const TaskEntry*>> entry(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::map<std::string, const TaskEntry*> by_label;
    for (const auto& t : models[m].tasks) by_label[t.label] = &t;
    for (const auto& label : lb.tasks) entry[m].push_back(by_label.at(label));
  }

  for (std::size_t k = 0; k < lb.tasks.size(); ++k) {
    NormalizationBounds nb{entry[0][k]->tokens_avg, entry[0][k]->tokens_avg};
    for (std::size_t m = 1; m < models.size(); ++m) {
      nb.t_min = std::min(nb.t_min, entry[m][k]->tokens_avg);
      nb.t_max = std::max(nb.t_max, entry[m][k]->tokens_avg);
    }
    lb.bounds.push_back(nb);
  }

  double n = static_cast<double>(lb.tasks.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    LeaderboardRow row;
    row.model = models[m].model;
    row.source = models[m].source;
    for (std::size_t k = 0; k < lb.tasks.size(); ++k) {
      const TaskEntry& e = *entry[m][k];
      double eff = token_efficiency(e.tokens_avg, lb.bounds[k]);
      double o = overthinking_score(e.accuracy, eff);
      row.task_efficiency.push_back(eff);
      row.task_score.push_back(o);
      row.accuracy += e.accuracy / n;
      row.instruction_following += e.instruction_following / n;
      row.tokens_avg += e.tokens_avg / n;
      row.words_avg += e.words_avg / n;
      row.chars_avg += e.chars_avg / n;
      row.token_efficiency += eff / n;
      row.efficiency_score += o / n;
    }
    lb.rows.push_back(std::move(row));
  }
  std::stable_sort(lb.rows.begin(), lb.rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.efficiency_score != b.efficiency_score) return a.efficiency_score > b.efficiency_score;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.model < b.model;
  });
  for (std::size_t i = 0; i < lb.rows.size(); ++i) lb.rows[i].rank = static_cast<int>(i + 1);
  return lb;
}

Leaderboard compare_models(const std::vector<fs::path>& summary_files) {
  std::vector<ModelSummary> models;
  for (const auto& p : summary_files) models.push_back(load_summary(p));
  return compare_summaries(models);
}

std::string Leaderboard::to_csv() const {
  std::string out =
      "rank,model,accuracy,instruction_following,efficiency_score,tokens_avg,words_avg,chars_avg,"
      "token_efficiency,source\n";
  for (const auto& r : rows) {
    out += std::to_string(r.rank) + "," + csv_escape(r.model) + "," + fixed(r.accuracy, 6) + "," +
           fixed(r.instruction_following, 6) + "," + fixed(r.efficiency_score, 6) + "," +
           fixed(r.tokens_avg, 3) + "," + fixed(r.words_avg, 3) + "," + fixed(r.chars_avg, 3) + "," +
           fixed(r.token_efficiency, 6) + "," + csv_escape(r.source) + "\n";
  }
  return out;
}

std::string Leaderboard::to_text() const {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.rank), r.model, fixed(100 * r.accuracy, 2),
                     fixed(100 * r.instruction_following, 2), fixed(r.efficiency_score, 4),
                     fixed(r.tokens_avg, 1), fixed(r.words_avg, 1), fixed(r.chars_avg, 1)});
  }
  std::string out = render_table({"Rank", "Model", "Accuracy (Avg)", "Instruction Following (Avg)",
                                  "Efficiency Score (Avg)", "Tokens (Avg)", "Words (Avg)", "Chars (Avg)"},
                                 cells);
  out += "\nCohort token bounds over " + std::to_string(tasks.size()) + " task configs.\n";
  for (const auto& w : warnings) out += "warning: " + w + "\n";
  return out;
}

ojson Leaderboard::to_json() const {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["bounds_mode"] = "cohort";
  ojson t = ojson::array();
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    t.push_back({{"task", tasks[k]}, {"t_min", bounds[k].t_min}, {"t_max", bounds[k].t_max}});
  }
  j["tasks"] = t;
  ojson rs = ojson::array();
  for (const auto& r : rows) {
    ojson e;
    e["rank"] = r.rank;
    e["model"] = r.model;
    e["accuracy"] = r.accuracy;
    e["instruction_following"] = r.instruction_following;
    e["efficiency_score"] = r.efficiency_score;
    e["tokens_avg"] = r.tokens_avg;
    e["words_avg"] = r.words_avg;
    e["chars_avg"] = r.chars_avg;
    e["token_efficiency"] = r.token_efficiency;
    e["source"] = r.source;
    ojson per = ojson::array();
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      per.push_back({{"task", tasks[k]}, {"token_efficiency", r.task_efficiency[k]},
                     {"efficiency_score", r.task_score[k]}});
    }
    e["tasks"] = per;
    rs.push_back(e);
  }
  j["rows"] = rs;
  j["warnings"] = warnings;
  return j;
}

}  // namespace thinkbench
