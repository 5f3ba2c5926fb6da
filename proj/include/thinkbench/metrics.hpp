#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thinkbench/client.hpp"
#include "thinkbench/extraction.hpp"
#include "thinkbench/taskgen.hpp"

namespace thinkbench {

// Decimal answers are correct when within max(abs_tol, rel_tol * |truth|)
// of the truth, or equal to the truth rounded to round_places decimals.
struct TolerancePolicy {
  double abs_tol = 1e-6;
  double rel_tol = 1e-4;
  int round_places = 2;
};

// Shape mismatches are simply incorrect.
bool judge_correct(TaskKind task, const std::optional<AnswerValue>& parsed, const GroundTruth& truth,
                   const TolerancePolicy& policy = {});

struct SampleRecord {
  TaskKind task = TaskKind::kSorting;
  std::optional<int> list_size;
  int fold = 0;
  int index = 0;

  std::string response_text;
  std::int64_t tokens = 0;
  TokenSource token_source = TokenSource::kWordEstimate;
  std::int64_t words = 0;
  std::int64_t chars = 0;
  bool truncated = false;
  double latency_s = 0.0;
  int attempts = 0;

  std::optional<ParsedAnswer> parsed;
  std::vector<std::pair<Tier, InvalidReason>> rejected;
  bool correct = false;
  bool instruction_followed = false;
  // Set when the request never produced a response.
  std::optional<RequestFailure> failure;

  ConfigKey key() const { return ConfigKey{task, list_size}; }
};

// Extracts and judges one response.
SampleRecord score_response(const ProblemInstance& instance, const ModelResponse& response,
                            const TolerancePolicy& policy = {});
SampleRecord failed_record(const ProblemInstance& instance, const RequestFailure& failure);

struct NormalizationBounds {
  double t_min = 0.0;
  double t_max = 0.0;

  void validate() const;  // throws ConfigError
};

// Slot 0..3 per Tier, slot 4 for "no answer".
using TierCounts = std::array<int, 5>;

struct FoldMetrics {
  int fold = 0;
  int sample_count = 0;
  int failures = 0;
  double accuracy = 0.0;
  double instruction_following = 0.0;
  // Verbosity means cover samples that produced a response.
  double mean_tokens = 0.0;
  double mean_words = 0.0;
  double mean_chars = 0.0;
  double truncated_fraction = 0.0;
  TierCounts tiers{};
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;
};

// Population mean and standard deviation.
Stat mean_std(const std::vector<double>& values);

struct TaskMetrics {
  ConfigKey key;
  int folds = 0;
  int sample_count = 0;
  int failures = 0;
  Stat accuracy;
  Stat instruction_following;
  Stat tokens;
  Stat words;
  Stat chars;
  Stat truncated_fraction;
  NormalizationBounds bounds;
  double token_efficiency = 0.0;
  double overthinking_score = 0.0;
  TierCounts tiers{};
};

// Throws ConfigError for an empty fold.
FoldMetrics fold_metrics(const std::vector<SampleRecord>& records);

// E_t = 1 - (mean_tokens - t_min) / (t_max - t_min), clamped to [0, 1];
// 1 when t_min == t_max.
double token_efficiency(double mean_tokens, const NormalizationBounds& bounds);

// Harmonic mean 2AE / (A + E); 0 when A + E == 0.
double overthinking_score(double accuracy, double efficiency);

// Throws ConfigError for an empty fold list.
TaskMetrics aggregate_folds(const ConfigKey& key, const std::vector<FoldMetrics>& folds,
                            const NormalizationBounds& bounds);

}  // namespace thinkbench
