#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "thinkbench/errors.hpp"
#include "thinkbench/harness.hpp"
#include "thinkbench/rng.hpp"

using namespace thinkbench;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

RunConfig small_run(MockScript script, int n = 10) {
  RunConfig c;
  c.spec.tasks = {kAllTasks.begin(), kAllTasks.end()};
  c.spec.datapoints = n;
  c.spec.seed = 42;
  c.mock.script = script;
  c.backend.backoff_base = std::chrono::milliseconds(0);
  c.backend.max_retries = 1;
  c.run_id = "test";
  return c;
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("thinkbench-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<json> details_json(const ReportBundle& b) {
  std::vector<json> out;
  for (const auto& r : b.details) out.push_back(json::parse(record_to_json(r).dump()));
  return out;
}

}  // namespace

TEST_CASE("perfect and wrong oracles") {
  auto perfect = run_evaluation(small_run(MockScript::kPerfect));
  REQUIRE(perfect.tasks.size() == 14);
  for (const auto& t : perfect.tasks) {
    CHECK(t.accuracy.mean == 1.0);
    CHECK(t.instruction_following.mean == 1.0);
  }
  auto wrong = run_evaluation(small_run(MockScript::kWrong));
  for (const auto& t : wrong.tasks) {
    INFO(t.key.label());
    CHECK(t.accuracy.mean == 0.0);
    CHECK(t.instruction_following.mean == 1.0);
  }
}

TEST_CASE("invalid config fails before running") {
  auto c = small_run(MockScript::kPerfect, 0);
  CHECK_THROWS_AS(run_evaluation(c), ConfigError);
  c = small_run(MockScript::kPerfect);
  c.sampling.temperature = -1;
  CHECK_THROWS_AS(run_evaluation(c), ConfigError);
}

TEST_CASE("runs are deterministic apart from timing") {
  auto c = small_run(MockScript::kChaos);
  c.store_details = true;
  c.backend.max_in_flight = 5;
  auto a = run_evaluation(c);
  auto b = run_evaluation(c);
  a.meta.wall_clock_s = b.meta.wall_clock_s = 0;
  a.meta.started_at = b.meta.started_at = "";
  CHECK(summary_json(a).dump() == summary_json(b).dump());
  CHECK(tasks_csv(a) == tasks_csv(b));
  CHECK(details_json(a) == details_json(b));
  CHECK(a.dataset_jsonl == b.dataset_jsonl);
}

TEST_CASE("injected failures only touch their own samples") {
  auto base = small_run(MockScript::kPerfect, 20);
  base.store_details = true;
  auto clean = run_evaluation(base);
  auto faulty_cfg = base;
  faulty_cfg.mock.fail_rate = 0.1;
  faulty_cfg.mock.fail_seed = 7;
  auto faulty = run_evaluation(faulty_cfg);
  REQUIRE(clean.details.size() == faulty.details.size());
  int failed = 0;
  for (std::size_t i = 0; i < clean.details.size(); ++i) {
    const auto& f = faulty.details[i];
    if (f.failure) {
      ++failed;
      CHECK_FALSE(f.correct);
    } else {
      CHECK(record_to_json(f).dump() == record_to_json(clean.details[i]).dump());
    }
  }
  CHECK(failed > 0);
  CHECK(faulty.meta.failures == failed);
  CHECK_FALSE(faulty.meta.aborted);
}

TEST_CASE("a mostly failing fold aborts with partial results") {
  auto c = small_run(MockScript::kPerfect, 10);
  c.mock.fail_rate = 1.0;
  auto b = run_evaluation(c);
  CHECK(b.meta.aborted);
  CHECK(b.tasks.size() == 1);
  CHECK(b.meta.failures == 10);

  auto dir = temp_dir("abort");
  c.output_dir = dir;
  CHECK_THROWS_AS(run_and_report(c), BackendError);
  CHECK(fs::exists(dir / "test" / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("report files") {
  auto dir = temp_dir("reports");
  auto c = small_run(MockScript::kPerfect, 5);
  c.spec.tasks = {TaskKind::kSum, TaskKind::kDivision};
  c.spec.folds = 2;
  auto bundle = run_evaluation(c);
  auto files = write_reports(bundle, dir / "a");
  std::set<std::string> names;
  for (const auto& f : files) names.insert(f.filename().string());
  CHECK(names == std::set<std::string>{"config.json", "summary.json", "tasks.csv", "summary.txt", "run.log"});

  write_reports(bundle, dir / "b");
  for (const auto& n : names) CHECK(slurp(dir / "a" / n) == slurp(dir / "b" / n));

  auto s = nlohmann::ordered_json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(s["schema_version"] == kReportSchemaVersion);
  CHECK(s["seed"] == 42);
  std::vector<std::string> keys;
  for (auto it = s["overall"].begin(); it != s["overall"].end(); ++it) keys.push_back(it.key());
  std::vector<std::string> pinned = {"accuracy",   "instruction_following", "efficiency_score",
                                     "tokens_avg", "words_avg",             "chars_avg"};
  CHECK(std::vector<std::string>(keys.begin(), keys.begin() + 6) == pinned);
  CHECK(s["tasks"].size() == 2);
  CHECK(s["tasks"][0]["folds"] == 2);
  CHECK(slurp(dir / "a" / "tasks.csv").rfind("schema_version,task,config,accuracy,", 0) == 0);

  c.store_details = true;
  auto detailed = run_evaluation(c);
  auto more = write_reports(detailed, dir / "c");
  CHECK(more.size() == 7);
  auto details = slurp(dir / "c" / "details.jsonl");
  CHECK(std::count(details.begin(), details.end(), '\n') == 2 * 2 * 5);
  auto first = json::parse(details.substr(0, details.find('\n')));
  CHECK(first["tier"] == "boxed");
  CHECK(first["correct"] == true);
  CHECK(first["response"].get<std::string>().find("\\boxed") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("unwritable output directory is reported up front") {
  auto dir = temp_dir("blocked");
  fs::create_directories(dir.parent_path());
  { std::ofstream(dir) << "a file, not a directory"; }
  auto c = small_run(MockScript::kPerfect, 1);
  c.output_dir = dir;
  CHECK_THROWS_AS(run_and_report(c), IoError);
  fs::remove(dir);
}

TEST_CASE("run id defaults to a fresh timestamped directory") {
  auto dir = temp_dir("runid");
  RunConfig c;
  c.output_dir = dir;
  auto first = resolve_run_dir(c);
  CHECK(c.run_id.rfind("run-", 0) == 0);
  fs::create_directories(first);
  RunConfig d;
  d.output_dir = dir;
  d.run_id = "";
  auto second = resolve_run_dir(d);
  if (d.run_id.substr(0, c.run_id.size()) == c.run_id) CHECK(second != first);
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Leaderboard

namespace {

ModelSummary model(const std::string& name, std::vector<std::pair<std::string, std::pair<double, double>>> tasks) {
  ModelSummary m;
  m.model = name;
  for (const auto& [label, at] : tasks) {
    TaskEntry e;
    e.label = label;
    e.accuracy = at.first;
    e.tokens_avg = at.second;
    m.tasks.push_back(e);
  }
  return m;
}

int rank_of(const Leaderboard& lb, const std::string& name) {
  for (const auto& r : lb.rows) {
    if (r.model == name) return r.rank;
  }
  return -1;
}

}  // namespace

TEST_CASE("cohort bounds") {
  auto lb = compare_summaries({model("a", {{"sum/n8", {0.9, 200}}}), model("b", {{"sum/n8", {0.9, 600}}})});
  REQUIRE(lb.rows.size() == 2);
  CHECK(lb.rows[0].model == "a");
  CHECK(lb.rows[0].token_efficiency == 1.0);
  CHECK(lb.rows[1].token_efficiency == 0.0);
  CHECK(lb.rows[1].efficiency_score == 0.0);

  auto single = compare_summaries({model("solo", {{"sum/n8", {0.5, 321}}})});
  CHECK(single.rows[0].token_efficiency == 1.0);
}

TEST_CASE("task intersection") {
  auto lb = compare_summaries({model("a", {{"sum/n8", {1, 1}}, {"mean/n8", {1, 1}}}),
                               model("b", {{"sum/n8", {1, 2}}})});
  CHECK(lb.tasks == std::vector<std::string>{"sum/n8"});
  CHECK(lb.warnings.size() == 1);
  CHECK_THROWS_AS(compare_summaries({model("a", {{"sum/n8", {1, 1}}}), model("b", {{"mean/n8", {1, 1}}})}),
                  ConfigError);
}

TEST_CASE("raising one model's tokens never improves its rank") {
  Xoshiro256 rng(17);
  auto unit = [&] { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; };
  const std::vector<std::string> labels = {"sum/n8", "mean/n8", "sorting/n8"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<ModelSummary> models;
    int n = 2 + static_cast<int>(rng.uniform(0, 3));
    for (int m = 0; m < n; ++m) {
      std::vector<std::pair<std::string, std::pair<double, double>>> ts;
      for (const auto& l : labels) {
        // Coarse values make ties common.
        ts.push_back({l, {std::round(unit() * 4) / 4, std::round(unit() * 8) * 100}});
      }
      models.push_back(model("m" + std::to_string(m), ts));
    }
    auto before = compare_summaries(models);
    auto x = static_cast<std::size_t>(rng.uniform(0, n - 1));
    auto k = static_cast<std::size_t>(rng.uniform(0, 2));
    models[x].tasks[k].tokens_avg += std::round(unit() * 4) * 100;
    auto after = compare_summaries(models);
    CHECK(rank_of(after, models[x].model) >= rank_of(before, models[x].model));
  }
}

TEST_CASE("compare_models reads written summaries") {
  auto dir = temp_dir("compare");
  auto c = small_run(MockScript::kPerfect, 5);
  c.spec.tasks = {TaskKind::kSum};
  auto a = run_evaluation(c);
  c.mock.script = MockScript::kPadded;
  auto b = run_evaluation(c);
  write_reports(a, dir / "concise");
  write_reports(b, dir / "padded");
  auto lb = compare_models({dir / "concise" / "summary.json", dir / "padded" / "summary.json"});
  REQUIRE(lb.rows.size() == 2);
  CHECK(lb.rows[0].source.find("concise") != std::string::npos);
  CHECK(lb.to_csv().rfind("rank,model,accuracy,instruction_following,efficiency_score", 0) == 0);
  CHECK(lb.to_text().find("Efficiency Score (Avg)") != std::string::npos);
  CHECK(lb.to_json()["bounds_mode"] == "cohort");
  CHECK_THROWS_AS(compare_models({dir / "missing.json"}), IoError);
  fs::remove_all(dir);
}
