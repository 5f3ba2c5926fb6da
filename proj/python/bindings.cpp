#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "thinkbench/errors.hpp"
#include "thinkbench/extraction.hpp"
#include "thinkbench/harness.hpp"

namespace py = pybind11;
using namespace thinkbench;

namespace {

// Structured results cross the boundary as JSON text; the Python layer
// decodes them.

TaskSpec make_spec(const std::vector<std::string>& tasks, int datapoints, int folds,
                   std::pair<std::int64_t, std::int64_t> range, const std::vector<int>& list_sizes,
                   std::optional<std::uint64_t> seed) {
  TaskSpec s;
  s.tasks.clear();
  for (const auto& name : tasks) {
    if (name == "all") {
      s.tasks.assign(kAllTasks.begin(), kAllTasks.end());
      continue;
    }
    auto t = parse_task(name);
    if (!t) throw ConfigError("unknown task '" + name + "'");
    s.tasks.push_back(*t);
  }
  s.datapoints = datapoints;
  s.folds = folds;
  s.range = ValueRange{range.first, range.second};
  s.list_sizes = list_sizes;
  s.seed = seed;
  return s;
}

std::string generate(const std::vector<std::string>& tasks, int datapoints, int folds,
                     std::pair<std::int64_t, std::int64_t> range, const std::vector<int>& list_sizes,
                     std::optional<std::uint64_t> seed) {
  return serialize_dataset(generate_dataset(make_spec(tasks, datapoints, folds, range, list_sizes, seed)));
}

std::string extract_json(const std::string& text, const std::string& task_name_,
                         const std::vector<std::int64_t>& numbers) {
  auto task = parse_task(task_name_);
  if (!task) throw ConfigError("unknown task '" + task_name_ + "'");
  Payload payload;
  if (payload_shape(*task) == PayloadShape::kPair) {
    if (numbers.size() != 2) throw ConfigError("pair tasks need exactly two numbers");
    payload = IntPair{numbers[0], numbers[1]};
  } else {
    payload = IntList{numbers};
  }
  auto r = extract(text, *task, payload);
  nlohmann::ordered_json out;
  if (r.answer) {
    out["answer"] = answer_to_json(r.answer->value);
    out["text"] = answer_to_text(r.answer->value);
    out["tier"] = tier_name(r.answer->tier);
    out["span"] = r.answer->raw_span;
  } else {
    out["answer"] = nullptr;
  }
  out["instruction_followed"] = r.boxed_present;
  return out.dump();
}

// Keyword arguments mirror the CLI flags of `thinkbench run`.
std::string evaluate(const std::string& model_id, const std::vector<std::string>& tasks, int datapoints,
                     int folds, std::pair<std::int64_t, std::int64_t> range, const std::vector<int>& list_sizes,
                     double temperature, double top_p, int max_tokens, bool store_details,
                     std::optional<std::string> output_dir, std::optional<std::uint64_t> seed,
                     const std::string& backend, const std::string& endpoint, const std::string& api_key_env,
                     int concurrency, int max_retries, const std::string& mock_script, int pad_factor,
                     double fail_rate, std::uint64_t fail_seed, std::optional<std::string> run_id) {
  RunConfig c;
  c.spec = make_spec(tasks, datapoints, folds, range, list_sizes, seed);
  c.sampling = SamplingParams{temperature, top_p, max_tokens};
  if (backend != "openai" && backend != "mock") throw ConfigError("backend must be 'openai' or 'mock'");
  c.backend.kind = backend == "mock" ? BackendKind::kMock : BackendKind::kWire;
  c.backend.endpoint = endpoint;
  c.backend.model_id = model_id;
  c.backend.api_key_env = api_key_env;
  c.backend.max_in_flight = concurrency;
  c.backend.max_retries = max_retries;
  auto script = parse_mock_script(mock_script);
  if (!script) throw ConfigError("unknown mock script '" + mock_script + "'");
  c.mock.script = *script;
  if (model_id.empty() && c.backend.kind == BackendKind::kMock) {
    c.backend.model_id = "mock-" + std::string(mock_script_name(*script));
  }
  c.mock.pad_factor = pad_factor;
  c.mock.fail_rate = fail_rate;
  c.mock.fail_seed = fail_seed;
  c.store_details = store_details;
  if (run_id) c.run_id = *run_id;
  ReportBundle bundle;
  if (output_dir) {
    c.output_dir = *output_dir;
    bundle = run_and_report(c);
  } else {
    bundle = run_evaluation(c);
    if (bundle.meta.aborted) throw BackendError("run aborted (" + bundle.meta.abort_reason + ")", false);
  }
  auto out = summary_json(bundle);
  if (output_dir) out["run"]["directory"] = (c.output_dir / bundle.meta.run_id).string();
  return out.dump();
}

std::string compare(const std::vector<std::filesystem::path>& paths) { return compare_models(paths).to_json().dump(); }

}  // namespace

PYBIND11_MODULE(_thinkbench, m) {
  m.doc() = "Core of the thinkbench math reasoning benchmark";
  m.attr("REPORT_SCHEMA_VERSION") = kReportSchemaVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "ReportIOError", PyExc_OSError);

  m.def("task_names", [] {
    std::vector<std::string> out;
    for (auto t : kAllTasks) out.emplace_back(task_name(t));
    return out;
  });
  m.def("generate_jsonl", &generate, py::arg("tasks"), py::arg("datapoints"), py::arg("folds"), py::arg("range"),
        py::arg("list_sizes"), py::arg("seed"));
  m.def("extract_json", &extract_json, py::arg("text"), py::arg("task"), py::arg("numbers"));
  m.def("overthinking_score", &overthinking_score, py::arg("accuracy"), py::arg("efficiency"));
  m.def(
      "token_efficiency",
      [](double mean_tokens, double t_min, double t_max) {
        NormalizationBounds b{t_min, t_max};
        b.validate();
        return token_efficiency(mean_tokens, b);
      },
      py::arg("mean_tokens"), py::arg("t_min"), py::arg("t_max"));
  m.def("default_templates", [] { return TemplateSet::defaults().to_json(); });
  m.def("evaluate_json", &evaluate, py::call_guard<py::gil_scoped_release>(), py::arg("model_id"),
        py::arg("tasks"), py::arg("datapoints"), py::arg("folds"), py::arg("range"), py::arg("list_sizes"),
        py::arg("temperature"), py::arg("top_p"), py::arg("max_tokens"), py::arg("store_details"),
        py::arg("output_dir"), py::arg("seed"), py::arg("backend"), py::arg("endpoint"), py::arg("api_key_env"),
        py::arg("concurrency"), py::arg("max_retries"), py::arg("mock_script"), py::arg("pad_factor"),
        py::arg("fail_rate"), py::arg("fail_seed"), py::arg("run_id"));
  m.def("compare_json", &compare, py::arg("summary_files"));
}
