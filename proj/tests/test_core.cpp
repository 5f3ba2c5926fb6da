#include "doctest.h"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "thinkbench/errors.hpp"
#include "thinkbench/prompting.hpp"
#include "thinkbench/rng.hpp"
#include "thinkbench/taskgen.hpp"
#include "thinkbench/values.hpp"

using namespace thinkbench;

TEST_CASE("splitmix64 reference vector") {
  SplitMix64 sm(1234567);
  CHECK(sm.next() == 6457827717110365317ULL);
  CHECK(sm.next() == 3203168211198807973ULL);
  CHECK(sm.next() == 9817491932198370423ULL);
}

TEST_CASE("xoshiro256** seeded through splitmix64") {
  Xoshiro256 x(42);
  CHECK(x.next() == 1546998764402558742ULL);
  CHECK(x.next() == 6990951692964543102ULL);
  CHECK(x.next() == 12544586762248559009ULL);
}

TEST_CASE("fnv1a64 and stream derivation") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(derive_stream_seed(42, "sorting", 8, 0) == 4692723290712285408ULL);
  CHECK(derive_stream_seed(42, "division", 0, 2) == 10492935988753051956ULL);
}

TEST_CASE("uniform stays in range and hits both ends") {
  Xoshiro256 x(7);
  bool lo = false, hi = false;
  for (int i = 0; i < 20000; ++i) {
    auto v = x.uniform(-3, 3);
    REQUIRE(v >= -3);
    REQUIRE(v <= 3);
    lo |= v == -3;
    hi |= v == 3;
  }
  CHECK(lo);
  CHECK(hi);
  CHECK(x.uniform(5, 5) == 5);
}

TEST_CASE("rational formatting") {
  CHECK(rational_to_string(Rational(7, 2)) == "7/2");
  CHECK(rational_to_string(Rational(-6, 3)) == "-2");
  CHECK(rational_to_decimal(Rational(7, 2)) == "3.5");
  CHECK(rational_to_decimal(Rational(-1, 8)) == "-0.125");
  CHECK(rational_to_decimal(Rational(1, 3)) == "0.333333");
  CHECK(rational_to_decimal(Rational(2, 3)) == "0.666667");
  CHECK(rational_to_decimal(Rational(-2, 3)) == "-0.666667");
  CHECK(rational_to_decimal(Rational(5)) == "5");
  CHECK(round_to_places(Rational(37, 3), 2) == Rational(1233, 100));
  CHECK(round_to_places(Rational(-1, 8), 2) == Rational(-13, 100));
  CHECK(round_to_places(Rational(1, 8), 2) == Rational(13, 100));
  CHECK(parse_rational("-14/4") == Rational(-7, 2));
  CHECK(parse_rational("14/-4") == Rational(-7, 2));
  CHECK(parse_rational("007/010") == Rational(7, 10));
  CHECK(make_rational(BigInt(-6), BigInt(-4)) == Rational(3, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
  CHECK(render_int_list({3, -5, 7}) == "[3, -5, 7]");
  CHECK(IntSet::from({3, 1, 3}).values == std::vector<std::int64_t>{1, 3});
}

TEST_CASE("task names round-trip") {
  for (auto t : kAllTasks) CHECK(parse_task(task_name(t)) == t);
  CHECK_FALSE(parse_task("integration").has_value());
  CHECK(payload_shape(TaskKind::kAbsoluteDifference) == PayloadShape::kPair);
  CHECK(answer_shape(TaskKind::kMedian) == AnswerShape::kNumber);
  CHECK(answer_shape(TaskKind::kMode) == AnswerShape::kSet);
}

// ---------------------------------------------------------------------------
// taskgen

TEST_CASE("ground truth examples") {
  CHECK(ground_truth(TaskKind::kDivision, IntPair{7, 2}) == GroundTruth(Rational(7, 2)));
  CHECK(ground_truth(TaskKind::kSubtraction, IntPair{3, 10}) == GroundTruth(BigInt(7)));
  CHECK(ground_truth(TaskKind::kAbsoluteDifference, IntPair{3, 10}) == GroundTruth(BigInt(7)));
  CHECK(ground_truth(TaskKind::kComparison, IntPair{3, 10}) == GroundTruth(Relation::kLess));
  CHECK(ground_truth(TaskKind::kMedian, IntList{{4, 1, 3, 2}}) == GroundTruth(Rational(5, 2)));
  CHECK(ground_truth(TaskKind::kMode, IntList{{1, 2, 2, 3, 3}}) == GroundTruth(IntSet{{2, 3}}));
  CHECK(ground_truth(TaskKind::kOddCount, IntList{{-3, -2, 0, 5}}) == GroundTruth(BigInt(2)));
  CHECK(ground_truth(TaskKind::kMean, IntList{{1, 2, 3, 4, 5, 6, 7, 9}}) == GroundTruth(Rational(37, 8)));
  CHECK_THROWS_AS(ground_truth(TaskKind::kDivision, IntPair{1, 0}), std::logic_error);
  CHECK_THROWS_AS(ground_truth(TaskKind::kSum, IntPair{1, 2}), std::logic_error);
}

TEST_CASE("multiplication does not overflow") {
  IntList big{{100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100}};
  CHECK(oracle::canonical(ground_truth(TaskKind::kMultiplication, big)) == "1" + std::string(22, '0'));
}

TEST_CASE("ground truth agrees with the GMP oracle") {
  Xoshiro256 rng(2024);
  ValueRange range{-50, 50};
  for (auto t : kAllTasks) {
    for (int i = 0; i < 300; ++i) {
      std::optional<int> n;
      if (payload_shape(t) == PayloadShape::kList) n = 1 + static_cast<int>(rng.uniform(0, 11));
      auto inst = generate_instance(t, n, rng, range);
      INFO(task_name(t));
      REQUIRE(oracle::canonical(inst.truth) ==
              oracle::answer(std::string(task_name(t)), oracle::payload_numbers(inst.payload)));
    }
  }
}

TEST_CASE("task spec validation") {
  TaskSpec s;
  CHECK_NOTHROW(s.validate());
  s.datapoints = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.folds = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.range = {5, 1};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.list_sizes = {0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.tasks = {TaskKind::kDivision};
  s.range = {0, 0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.tasks = {};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  TaskSpec s;
  s.tasks = {kAllTasks.begin(), kAllTasks.end()};
  s.datapoints = 20;
  s.folds = 2;
  s.list_sizes = {4, 8};
  s.seed = 42;
  auto a = serialize_dataset(generate_dataset(s));
  auto b = serialize_dataset(generate_dataset(s));
  CHECK(a == b);
  s.seed = 43;
  CHECK(serialize_dataset(generate_dataset(s)) != a);
}

TEST_CASE("adding a task leaves other task streams unchanged") {
  TaskSpec s;
  s.tasks = {TaskKind::kSum};
  s.datapoints = 10;
  s.seed = 9;
  auto only = generate_dataset(s);
  s.tasks = {TaskKind::kSorting, TaskKind::kSum};
  auto both = generate_dataset(s);
  ConfigKey key{TaskKind::kSum, 8};
  REQUIRE(both.entries.count(key));
  CHECK(instance_to_json(only.entries.at(key)[0][3], 9) == instance_to_json(both.entries.at(key)[0][3], 9));
}

TEST_CASE("dataset shape: pair tasks ignore list sizes, folds differ") {
  TaskSpec s;
  s.tasks = {TaskKind::kComparison, TaskKind::kMean};
  s.datapoints = 30;
  s.folds = 3;
  s.list_sizes = {4, 16};
  s.seed = 1;
  auto d = generate_dataset(s);
  CHECK(d.entries.size() == 3);
  CHECK(d.entries.count(ConfigKey{TaskKind::kComparison, std::nullopt}));
  const auto& mean16 = d.entries.at(ConfigKey{TaskKind::kMean, 16});
  REQUIRE(mean16.size() == 3);
  CHECK(std::get<IntList>(mean16[1][0].payload).values.size() == 16);
  CHECK(instance_to_json(mean16[0][0], 1) != instance_to_json(mean16[1][0], 1));
  for (const auto& fold : mean16) {
    for (const auto& inst : fold) {
      for (auto v : std::get<IntList>(inst.payload).values) {
        CHECK(v >= -100);
        CHECK(v <= 100);
      }
    }
  }
}

TEST_CASE("comparison schedule is balanced") {
  for (int n : {1, 2, 3, 10, 11, 100, 1000}) {
    auto sch = comparison_schedule(n);
    REQUIRE(static_cast<int>(sch.size()) == n);
    auto g = std::count(sch.begin(), sch.end(), Relation::kGreater);
    auto l = std::count(sch.begin(), sch.end(), Relation::kLess);
    auto e = std::count(sch.begin(), sch.end(), Relation::kEqual);
    CHECK(std::max({g, l, e}) - std::min({g, l, e}) <= 1);
  }
}

TEST_CASE("mode lists always have a repeated value") {
  TaskSpec s;
  s.tasks = {TaskKind::kMode};
  s.datapoints = 500;
  s.list_sizes = {2, 8};
  s.range = {-1000, 1000};
  s.seed = 5;
  for (const auto& [key, folds] : generate_dataset(s).entries) {
    for (const auto& inst : folds[0]) {
      auto v = std::get<IntList>(inst.payload).values;
      std::set<std::int64_t> uniq(v.begin(), v.end());
      CHECK(uniq.size() < v.size());
    }
  }
}

TEST_CASE("serialized records carry the pinned fields") {
  TaskSpec s;
  s.tasks = {TaskKind::kDivision};
  s.datapoints = 1;
  s.seed = 3;
  auto text = serialize_dataset(generate_dataset(s));
  auto j = nlohmann::json::parse(text.substr(0, text.find('\n')));
  CHECK(j["task"] == "division");
  CHECK(j["config"] == "pair");
  CHECK(j["fold"] == 0);
  CHECK(j["index"] == 0);
  CHECK(j["payload"]["kind"] == "pair");
  CHECK(j["truth"]["kind"] == "rational");
  CHECK(j["seed"] == 3);
}

// ---------------------------------------------------------------------------
// prompting

TEST_CASE("default templates render the payload") {
  ProblemInstance inst;
  inst.task = TaskKind::kSum;
  inst.list_size = 3;
  inst.payload = IntList{{4, -2, 9}};
  inst.truth = ground_truth(inst.task, inst.payload);
  auto p = render_prompt(inst);
  CHECK(p.find("[4, -2, 9]") != std::string::npos);
  CHECK(p.find("\\boxed{") != std::string::npos);

  inst.task = TaskKind::kSubtraction;
  inst.list_size.reset();
  inst.payload = IntPair{3, 10};
  p = render_prompt(inst);
  CHECK(p.find("subtract 3 from 10") != std::string::npos);
}

TEST_CASE("every task has a valid default template") {
  auto d = TemplateSet::defaults();
  for (auto t : kAllTasks) {
    REQUIRE(d.contains(t));
    CHECK(d.at(t).answer_instruction.find("\\boxed{") != std::string::npos);
  }
}

TEST_CASE("template overrides and validation") {
  auto set = TemplateSet::from_json(
      R"({"version":1,"templates":[{"task":"sum","body":"Total of {list}?","separator":" ",)"
      R"("answer_instruction":"Put it in \\boxed{answer}."}]})");
  ProblemInstance inst;
  inst.task = TaskKind::kSum;
  inst.list_size = 2;
  inst.payload = IntList{{1, 2}};
  inst.truth = BigInt(3);
  CHECK(render_prompt(inst, set) == "Total of [1, 2]? Put it in \\boxed{answer}.");
  CHECK(set.at(TaskKind::kSorting).body == TemplateSet::defaults().at(TaskKind::kSorting).body);

  CHECK_THROWS_AS(TemplateSet::from_json(R"({"version":1,"templates":[{"task":"sum","body":"{list}",)"
                                         R"("answer_instruction":"no box"}]})"),
                  ConfigError);
  CHECK_THROWS_AS(TemplateSet::from_json(R"({"version":1,"templates":[{"task":"division","body":"Divide",)"
                                         R"("answer_instruction":"\\boxed{x}"}]})"),
                  ConfigError);
  CHECK_THROWS_AS(TemplateSet::from_json("not json"), ConfigError);
  CHECK_THROWS_AS(TemplateSet::from_json(R"({"version":1,"templates":[{"task":"nope","body":"{list}",)"
                                         R"("answer_instruction":"\\boxed{x}"}]})"),
                  ConfigError);
}

TEST_CASE("template json round-trips") {
  auto d = TemplateSet::defaults();
  auto again = TemplateSet::from_json(d.to_json());
  for (auto t : kAllTasks) {
    CHECK(again.at(t).body == d.at(t).body);
    CHECK(again.at(t).separator == d.at(t).separator);
    CHECK(again.at(t).answer_instruction == d.at(t).answer_instruction);
  }
}

TEST_CASE("shipped template file matches the built-in defaults") {
  auto file = TemplateSet::from_file(THINKBENCH_SOURCE_DIR "/data/templates.json");
  auto d = TemplateSet::defaults();
  for (auto t : kAllTasks) {
    INFO(task_name(t));
    CHECK(file.at(t).body == d.at(t).body);
    CHECK(file.at(t).separator == d.at(t).separator);
    CHECK(file.at(t).answer_instruction == d.at(t).answer_instruction);
  }
}
