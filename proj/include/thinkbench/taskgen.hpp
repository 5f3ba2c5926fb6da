#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "thinkbench/rng.hpp"
#include "thinkbench/task.hpp"
#include "thinkbench/values.hpp"

namespace thinkbench {

// Ordered pair (num1, num2) as they appear in the prompt.
struct IntPair {
  std::int64_t a = 0;
  std::int64_t b = 0;
  friend bool operator==(const IntPair&, const IntPair&) = default;
};

using Payload = std::variant<IntList, IntPair>;

// Exact expected answer. BigInt for integer results, Rational for
// division/mean/median (lowest terms, non-zero denominator).
using GroundTruth = std::variant<BigInt, Rational, IntList, Relation, IntSet>;

struct ValueRange {
  std::int64_t min = -100;
  std::int64_t max = 100;
};

struct TaskSpec {
  std::vector<TaskKind> tasks = {TaskKind::kSorting};
  int datapoints = 1000;
  int folds = 1;
  ValueRange range;
  std::vector<int> list_sizes = {8};
  std::optional<std::uint64_t> seed;

  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

// Generation unit: a task plus its list size (list tasks) or nothing (pair tasks).
struct ConfigKey {
  TaskKind task = TaskKind::kSorting;
  std::optional<int> list_size;

  std::string label() const;  // "sorting/n8", "division/pair"
  std::string config_label() const;  // "n8" or "pair"
  friend auto operator<=>(const ConfigKey&, const ConfigKey&) = default;
};

struct ProblemInstance {
  TaskKind task = TaskKind::kSorting;
  std::optional<int> list_size;
  int fold = 0;
  int index = 0;
  Payload payload;
  GroundTruth truth;

  ConfigKey key() const { return ConfigKey{task, list_size}; }
};

struct Dataset {
  std::uint64_t seed = 0;  // effective run seed
  // folds[f][k] is instance k of fold f.
  std::map<ConfigKey, std::vector<std::vector<ProblemInstance>>> entries;
};

Dataset generate_dataset(const TaskSpec& spec);

// Draws one instance from `rng`. `forced` pins the comparison class; when
// absent for comparison, the class is drawn uniformly.
ProblemInstance generate_instance(TaskKind task, std::optional<int> list_size,
                                  Xoshiro256& rng, const ValueRange& range,
                                  std::optional<Relation> forced = std::nullopt);

// Exact expected answer. Throws std::logic_error for a zero divisor or a
// payload whose shape does not match the task.
GroundTruth ground_truth(TaskKind task, const Payload& payload);

// Comparison class schedule for one fold: floor(n/3) of each, remainder
// assigned greater, then less.
std::vector<Relation> comparison_schedule(int n);

// Line-delimited JSON, one record per instance:
// {"task","config","fold","index","payload","truth","seed"}
std::string serialize_dataset(const Dataset& dataset);
nlohmann::ordered_json payload_to_json(const Payload& payload);
nlohmann::ordered_json truth_to_json(const GroundTruth& truth);
nlohmann::ordered_json instance_to_json(const ProblemInstance& inst, std::uint64_t seed);

// Human-readable truth (used by scripted backends and reports).
std::string truth_to_text(const GroundTruth& truth);

}  // namespace thinkbench
