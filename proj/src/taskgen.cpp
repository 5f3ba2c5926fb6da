#include "thinkbench/taskgen.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "thinkbench/errors.hpp"

namespace thinkbench {
namespace {

std::vector<std::int64_t> draw_list(int n, Xoshiro256& rng, const ValueRange& range) {
  std::vector<std::int64_t> values(static_cast<std::size_t>(n));
  for (auto& v : values) v = rng.uniform(range.min, range.max);
  return values;
}

bool all_distinct(const std::vector<std::int64_t>& values) {
  std::unordered_set<std::int64_t> seen(values.begin(), values.end());
  return seen.size() == values.size();
}

IntPair draw_comparison(Relation cls, Xoshiro256& rng, const ValueRange& range) {
  std::int64_t a = rng.uniform(range.min, range.max);
  if (cls == Relation::kEqual) return {a, a};
  std::int64_t b = rng.uniform(range.min, range.max);
  while (b == a) b = rng.uniform(range.min, range.max);
  const auto hi = std::max(a, b);
  const auto lo = std::min(a, b);
  return cls == Relation::kGreater ? IntPair{hi, lo} : IntPair{lo, hi};
}

const std::vector<std::int64_t>& list_of(TaskKind task, const Payload& payload) {
  const auto* list = std::get_if<IntList>(&payload);
  if (list == nullptr) {
    throw std::logic_error("task " + std::string(task_name(task)) + " expects a list payload");
  }
  if (list->values.empty()) throw std::logic_error("empty list payload");
  return list->values;
}

IntPair pair_of(TaskKind task, const Payload& payload) {
  const auto* pair = std::get_if<IntPair>(&payload);
  if (pair == nullptr) {
    throw std::logic_error("task " + std::string(task_name(task)) + " expects a pair payload");
  }
  return *pair;
}

}  // namespace

void TaskSpec::validate() const {
  if (tasks.empty()) throw ConfigError("at least one task is required");
  if (datapoints < 1) throw ConfigError("datapoints must be >= 1");
  if (folds < 1) throw ConfigError("folds must be >= 1");
  if (range.min > range.max) throw ConfigError("range min must not exceed range max");
  if (list_sizes.empty()) throw ConfigError("at least one list size is required");
  const bool has_list_task = std::any_of(tasks.begin(), tasks.end(), [](TaskKind t) {
    return payload_shape(t) == PayloadShape::kList;
  });
  for (int n : list_sizes) {
    if (n < 1) throw ConfigError("list sizes must be positive");
    if (has_list_task && n < 2) throw ConfigError("list sizes must be >= 2 for list tasks");
  }
  for (TaskKind t : tasks) {
    if (t == TaskKind::kDivision && range.min == 0 && range.max == 0) {
      throw ConfigError("division needs a non-zero value in range; [0, 0] only offers zero");
    }
    if (t == TaskKind::kComparison && range.min == range.max) {
      throw ConfigError("comparison needs at least two distinct values in range");
    }
  }
}

std::string ConfigKey::config_label() const {
  return list_size ? "n" + std::to_string(*list_size) : "pair";
}

std::string ConfigKey::label() const {
  return std::string(task_name(task)) + "/" + config_label();
}

std::vector<Relation> comparison_schedule(int n) {
  const int base = n / 3;
  const int rem = n % 3;
  std::vector<Relation> out;
  out.reserve(static_cast<std::size_t>(n));
  out.insert(out.end(), static_cast<std::size_t>(base + (rem > 0 ? 1 : 0)), Relation::kGreater);
  out.insert(out.end(), static_cast<std::size_t>(base + (rem > 1 ? 1 : 0)), Relation::kLess);
  out.insert(out.end(), static_cast<std::size_t>(base), Relation::kEqual);
  return out;
}

ProblemInstance generate_instance(TaskKind task, std::optional<int> list_size,
                                  Xoshiro256& rng, const ValueRange& range,
                                  std::optional<Relation> forced) {
  ProblemInstance inst;
  inst.task = task;
  if (payload_shape(task) == PayloadShape::kList) {
    if (!list_size || *list_size < 1) throw ConfigError("list task requires a list size");
    inst.list_size = list_size;
    auto values = draw_list(*list_size, rng, range);
    if (task == TaskKind::kMode && values.size() >= 2 && all_distinct(values)) {
      // Copy one element over another so at least one value repeats.
      const auto n = static_cast<std::int64_t>(values.size());
      const auto src = static_cast<std::size_t>(rng.uniform(0, n - 1));
      auto dst = static_cast<std::size_t>(rng.uniform(0, n - 2));
      if (dst >= src) ++dst;
      values[dst] = values[src];
    }
    inst.payload = IntList{std::move(values)};
  } else if (task == TaskKind::kComparison) {
    const Relation cls =
        forced ? *forced : static_cast<Relation>(rng.uniform(0, 2));
    inst.payload = draw_comparison(cls, rng, range);
  } else {
    IntPair p;
    p.a = rng.uniform(range.min, range.max);
    p.b = rng.uniform(range.min, range.max);
    if (task == TaskKind::kDivision) {
      while (p.b == 0) p.b = rng.uniform(range.min, range.max);
    }
    inst.payload = p;
  }
  inst.truth = ground_truth(task, inst.payload);
  return inst;
}

Dataset generate_dataset(const TaskSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.seed = spec.seed ? *spec.seed : entropy_seed();

  std::vector<TaskKind> tasks;
  for (TaskKind t : spec.tasks) {
    if (std::find(tasks.begin(), tasks.end(), t) == tasks.end()) tasks.push_back(t);
  }
  std::vector<int> sizes;
  for (int n : spec.list_sizes) {
    if (std::find(sizes.begin(), sizes.end(), n) == sizes.end()) sizes.push_back(n);
  }

  for (TaskKind task : tasks) {
    std::vector<std::optional<int>> configs;
    if (payload_shape(task) == PayloadShape::kList) {
      for (int n : sizes) configs.emplace_back(n);
    } else {
      configs.emplace_back(std::nullopt);
    }
    for (const auto& size : configs) {
      auto& folds = ds.entries[ConfigKey{task, size}];
      folds.resize(static_cast<std::size_t>(spec.folds));
      for (int f = 0; f < spec.folds; ++f) {
        Xoshiro256 rng(derive_stream_seed(ds.seed, task_name(task), size.value_or(0), f));
        std::vector<Relation> schedule;
        if (task == TaskKind::kComparison) {
          schedule = comparison_schedule(spec.datapoints);
          // Fisher-Yates with the stream's own generator.
          for (std::size_t i = schedule.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i) - 1));
            std::swap(schedule[i - 1], schedule[j]);
          }
        }
        auto& out = folds[static_cast<std::size_t>(f)];
        out.reserve(static_cast<std::size_t>(spec.datapoints));
        for (int k = 0; k < spec.datapoints; ++k) {
          std::optional<Relation> forced;
          if (!schedule.empty()) forced = schedule[static_cast<std::size_t>(k)];
          ProblemInstance inst = generate_instance(task, size, rng, spec.range, forced);
          inst.fold = f;
          inst.index = k;
          out.push_back(std::move(inst));
        }
      }
    }
  }
  return ds;
}

GroundTruth ground_truth(TaskKind task, const Payload& payload) {
  switch (task) {
    case TaskKind::kSorting: {
      auto v = list_of(task, payload);
      std::sort(v.begin(), v.end());
      return IntList{std::move(v)};
    }
    case TaskKind::kComparison: {
      const auto p = pair_of(task, payload);
      if (p.a > p.b) return Relation::kGreater;
      if (p.a < p.b) return Relation::kLess;
      return Relation::kEqual;
    }
    case TaskKind::kSum: {
      BigInt s = 0;
      for (auto v : list_of(task, payload)) s += v;
      return s;
    }
    case TaskKind::kMultiplication: {
      BigInt prod = 1;
      for (auto v : list_of(task, payload)) prod *= v;
      return prod;
    }
    case TaskKind::kDivision: {
      const auto p = pair_of(task, payload);
      if (p.b == 0) throw std::logic_error("division payload with zero denominator");
      return make_rational(BigInt(p.a), BigInt(p.b));
    }
    case TaskKind::kSubtraction: {
      const auto p = pair_of(task, payload);
      return BigInt(p.b) - BigInt(p.a);
    }
    case TaskKind::kAbsoluteDifference: {
      const auto p = pair_of(task, payload);
      return BigInt(abs(BigInt(p.a) - BigInt(p.b)));
    }
    case TaskKind::kFindMaximum: {
      const auto& v = list_of(task, payload);
      return BigInt(*std::max_element(v.begin(), v.end()));
    }
    case TaskKind::kFindMinimum: {
      const auto& v = list_of(task, payload);
      return BigInt(*std::min_element(v.begin(), v.end()));
    }
    case TaskKind::kMean: {
      const auto& v = list_of(task, payload);
      BigInt s = 0;
      for (auto x : v) s += x;
      return make_rational(s, BigInt(v.size()));
    }
    case TaskKind::kMedian: {
      auto v = list_of(task, payload);
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size() / 2;
      if (v.size() % 2 == 1) return Rational(BigInt(v[m]));
      return make_rational(BigInt(v[m - 1]) + BigInt(v[m]), BigInt(2));
    }
    case TaskKind::kMode: {
      std::map<std::int64_t, int> counts;
      for (auto x : list_of(task, payload)) ++counts[x];
      int best = 0;
      for (const auto& [value, c] : counts) best = std::max(best, c);
      std::vector<std::int64_t> modes;
      for (const auto& [value, c] : counts) {
        if (c == best) modes.push_back(value);
      }
      return IntSet::from(std::move(modes));
    }
    case TaskKind::kOddCount:
    case TaskKind::kEvenCount: {
      std::int64_t odd = 0, even = 0;
      for (auto x : list_of(task, payload)) (x % 2 != 0 ? odd : even)++;
      return BigInt(task == TaskKind::kOddCount ? odd : even);
    }
  }
  throw std::logic_error("unknown task");
}

nlohmann::ordered_json payload_to_json(const Payload& payload) {
  nlohmann::ordered_json j;
  if (const auto* list = std::get_if<IntList>(&payload)) {
    j["kind"] = "list";
    j["values"] = list->values;
  } else {
    const auto& p = std::get<IntPair>(payload);
    j["kind"] = "pair";
    j["num1"] = p.a;
    j["num2"] = p.b;
  }
  return j;
}

nlohmann::ordered_json truth_to_json(const GroundTruth& truth) {
  nlohmann::ordered_json j;
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BigInt>) {
          j["kind"] = "integer";
          j["value"] = v.str();
        } else if constexpr (std::is_same_v<T, Rational>) {
          j["kind"] = "rational";
          j["value"] = rational_to_string(v);
        } else if constexpr (std::is_same_v<T, IntList>) {
          j["kind"] = "list";
          j["values"] = v.values;
        } else if constexpr (std::is_same_v<T, Relation>) {
          j["kind"] = "relation";
          j["value"] = relation_name(v);
        } else {
          j["kind"] = "set";
          j["values"] = v.values;
        }
      },
      truth);
  return j;
}

nlohmann::ordered_json instance_to_json(const ProblemInstance& inst, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["task"] = task_name(inst.task);
  j["config"] = inst.key().config_label();
  j["fold"] = inst.fold;
  j["index"] = inst.index;
  j["payload"] = payload_to_json(inst.payload);
  j["truth"] = truth_to_json(inst.truth);
  j["seed"] = seed;
  return j;
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const auto& [key, folds] : dataset.entries) {
    for (const auto& fold : folds) {
      for (const auto& inst : fold) {
        out += instance_to_json(inst, dataset.seed).dump();
        out += '\n';
      }
    }
  }
  return out;
}

std::string truth_to_text(const GroundTruth& truth) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BigInt>) {
          return v.str();
        } else if constexpr (std::is_same_v<T, Rational>) {
          return rational_to_decimal(v, 6);
        } else if constexpr (std::is_same_v<T, IntList>) {
          return render_int_list(v.values);
        } else if constexpr (std::is_same_v<T, Relation>) {
          switch (v) {
            case Relation::kGreater: return "greater than";
            case Relation::kLess: return "less than";
            case Relation::kEqual: return "equal to";
          }
          return "";
        } else {
          std::string s;
          for (std::size_t i = 0; i < v.values.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(v.values[i]);
          }
          return s;
        }
      },
      truth);
}

}  // namespace thinkbench
