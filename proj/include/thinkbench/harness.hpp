#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thinkbench/client.hpp"
#include "thinkbench/metrics.hpp"
#include "thinkbench/prompting.hpp"
#include "thinkbench/taskgen.hpp"

namespace thinkbench {

inline constexpr int kReportSchemaVersion = 1;

struct RunConfig {
  TaskSpec spec;
  SamplingParams sampling;
  BackendConfig backend;
  MockOptions mock;
  TemplateSet templates = TemplateSet::defaults();
  std::optional<std::string> templates_path;  // echoed only
  TolerancePolicy tolerance;
  // Defaults to [0, max_tokens].
  std::optional<NormalizationBounds> bounds;
  bool store_details = false;
  std::filesystem::path output_dir = "results";
  std::string run_id;  // empty: timestamped default
  // A fold with a larger failed fraction aborts the run.
  double abort_failure_fraction = 0.5;

  void validate() const;  // throws ConfigError
  NormalizationBounds effective_bounds() const;
  nlohmann::ordered_json to_json() const;
};

struct RunMetadata {
  std::string run_id;
  std::uint64_t effective_seed = 0;
  std::string backend_identity;
  std::string model;
  std::string started_at;  // UTC, ISO 8601
  double wall_clock_s = 0.0;
  int samples = 0;
  int failures = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct ReportBundle {
  RunMetadata meta;
  nlohmann::ordered_json config_echo;
  std::vector<TaskMetrics> tasks;  // ordered by (task, list size)
  std::vector<SampleRecord> details;  // filled iff store_details
  std::string dataset_jsonl;  // filled iff store_details
  std::vector<std::string> log;
  bool store_details = false;

  // Mean of the per-task Overthinking Scores.
  double efficiency_score() const;
  // O computed from the task-averaged accuracy and token efficiency.
  double efficiency_score_of_means() const;
};

struct ProgressEvent {
  ConfigKey key;
  int fold = 0;
  int folds = 0;
  const FoldMetrics* metrics = nullptr;
};

using ProgressFn = std::function<void(const ProgressEvent&)>;
using LogFn = std::function<void(const std::string&)>;

// Generation, prompting, inference, extraction and scoring for every task,
// config and fold. Request failures are scored incorrect. A fold whose failed
// fraction exceeds abort_failure_fraction stops the run; the bundle then
// holds the partial results and meta.aborted is set. When `backend` is null
// one is built from the config.
ReportBundle run_evaluation(const RunConfig& config, Backend* backend = nullptr,
                            const ProgressFn& progress = {}, const LogFn& log = {});

// Creates `dir` if needed and checks that files can be written there.
// Throws IoError.
void ensure_writable(const std::filesystem::path& dir);

// Picks the run id (timestamped default, suffixed when taken) and returns
// output_dir / run_id.
std::filesystem::path resolve_run_dir(RunConfig& config);

// Writes config.json, summary.json, tasks.csv, summary.txt and run.log, plus
// details.jsonl and dataset.jsonl when the bundle stores details. Output is a
// pure function of the bundle. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> write_reports(const ReportBundle& bundle,
                                                 const std::filesystem::path& run_dir);

nlohmann::ordered_json summary_json(const ReportBundle& bundle);
std::string tasks_csv(const ReportBundle& bundle);
std::string summary_text(const ReportBundle& bundle);
nlohmann::ordered_json record_to_json(const SampleRecord& record);

// ensure_writable, run_evaluation, write_reports. Throws BackendError after
// writing the partial reports of an aborted run.
ReportBundle run_and_report(RunConfig config, Backend* backend = nullptr,
                            const ProgressFn& progress = {}, const LogFn& log = {});

// ---------------------------------------------------------------------------
// Leaderboard

struct TaskEntry {
  std::string label;  // "sorting/n8"
  double accuracy = 0.0;
  double instruction_following = 0.0;
  double tokens_avg = 0.0;
  double words_avg = 0.0;
  double chars_avg = 0.0;
};

struct ModelSummary {
  std::string model;
  std::string source;
  std::vector<TaskEntry> tasks;
};

// Reads a summary.json written by write_reports. Throws IoError/ConfigError.
ModelSummary load_summary(const std::filesystem::path& path);

struct LeaderboardRow {
  int rank = 0;
  std::string model;
  std::string source;
  double accuracy = 0.0;
  double instruction_following = 0.0;
  double efficiency_score = 0.0;  // mean per-task O under cohort bounds
  double tokens_avg = 0.0;
  double words_avg = 0.0;
  double chars_avg = 0.0;
  double token_efficiency = 0.0;
  // Per task, in Leaderboard::tasks order.
  std::vector<double> task_efficiency;
  std::vector<double> task_score;
};

struct Leaderboard {
  std::vector<std::string> tasks;  // compared task configs
  std::vector<NormalizationBounds> bounds;  // cohort bounds per task
  std::vector<LeaderboardRow> rows;  // ranked
  std::vector<std::string> warnings;

  std::string to_csv() const;
  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
};

// Cohort bounds per task config (min/max of the models' mean tokens), ranked
// by mean O, then accuracy, then name. Task configs missing from some model
// are dropped with a warning; no common config is a ConfigError.
Leaderboard compare_summaries(const std::vector<ModelSummary>& models);
Leaderboard compare_models(const std::vector<std::filesystem::path>& summary_files);

}  // namespace thinkbench
