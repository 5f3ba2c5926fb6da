// thinkbench: generate datasets, run evaluations, compare runs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "thinkbench/errors.hpp"
#include "thinkbench/extraction.hpp"
#include "thinkbench/harness.hpp"

using namespace thinkbench;

namespace {

struct DataFlags {
  std::vector<std::string> tasks = {"sorting"};
  int datapoints = 1000;
  int folds = 1;
  std::vector<std::int64_t> range = {-100, 100};
  std::vector<int> list_sizes = {8};
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--tasks", tasks, "Tasks to evaluate, or \"all\"")->capture_default_str();
    app->add_option("--datapoints", datapoints, "Samples per task config")->capture_default_str();
    app->add_option("--folds", folds, "Independent re-sampled rounds")->capture_default_str();
    app->add_option("--range", range, "Inclusive value range: MIN MAX")->expected(2)->capture_default_str();
    app->add_option("--list_sizes,--list-sizes", list_sizes, "List lengths for list tasks")->capture_default_str();
    app->add_option("--seed", seed, "Run seed (random when omitted)");
  }

  TaskSpec spec() const {
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
    s.range = ValueRange{range.at(0), range.at(1)};
    s.list_sizes = list_sizes;
    s.seed = seed;
    return s;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

std::string read_stdin() {
  return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark language models on basic math reasoning and measure overthinking."};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with [run], [generate], ... sections; explicit flags win");

  // run ---------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Evaluate a model and write reports");
  run->fallthrough();
  DataFlags run_data;
  run_data.add(run);
  RunConfig rc;
  std::string backend_name = "openai";
  std::string endpoint = "http://localhost:8000/v1";
  std::string model_id;
  double timeout_s = 120;
  std::string mock_script = "perfect";
  std::optional<std::string> templates_path, system_prompt, tokenizer;
  std::vector<double> bounds;
  std::string output_dir = "results";
  bool quiet = false;
  std::string cuda_device;
  int tensor_parallel_size = 1;
  double gpu_memory_utilization = 0.9;
  bool trust_remote_code = false;

  run->add_option("--model_id,--model-id", model_id, "Model name sent to the server");
  run->add_option("--temperature", rc.sampling.temperature)->capture_default_str();
  run->add_option("--top_p,--top-p", rc.sampling.top_p)->capture_default_str();
  run->add_option("--max_tokens,--max-tokens", rc.sampling.max_tokens, "Generation cap per response")
      ->capture_default_str();
  run->add_flag("--store_details,--store-details", rc.store_details,
                "Also write per-sample records and the dataset");
  run->add_option("--output_dir,--output-dir", output_dir)->capture_default_str();
  run->add_option("--run_id,--run-id", rc.run_id, "Report subdirectory (timestamped when omitted)");
  run->add_option("--backend", backend_name, "openai or mock")
      ->check(CLI::IsMember({"openai", "mock"}))
      ->capture_default_str();
  run->add_option("--endpoint", endpoint, "Base URL of an OpenAI-compatible server")->capture_default_str();
  run->add_option("--api_key_env,--api-key-env", rc.backend.api_key_env,
                  "Environment variable holding the API key")
      ->capture_default_str();
  run->add_option("--timeout", timeout_s, "Per-request timeout in seconds")->capture_default_str();
  run->add_option("--max_retries,--max-retries", rc.backend.max_retries)->capture_default_str();
  run->add_option("--concurrency", rc.backend.max_in_flight, "Requests in flight")->capture_default_str();
  run->add_option("--system_prompt,--system-prompt", system_prompt);
  run->add_option("--tokenizer", tokenizer, "Registered tokenizer for counting when the server reports no usage");
  run->add_option("--templates", templates_path, "Prompt template JSON file");
  run->add_option("--bounds", bounds, "Token normalization bounds: TMIN TMAX (default 0 max_tokens)")->expected(2);
  run->add_option("--mock_script,--mock-script", mock_script, "perfect, padded, wrong, chaos or fixed")
      ->capture_default_str();
  run->add_option("--pad_factor,--pad-factor", rc.mock.pad_factor)->capture_default_str();
  run->add_option("--mock_text,--mock-text", rc.mock.fixed_text, "Response for the fixed script");
  run->add_option("--fail_rate,--fail-rate", rc.mock.fail_rate, "Fraction of mock requests that fail")
      ->capture_default_str();
  run->add_option("--fail_seed,--fail-seed", rc.mock.fail_seed)->capture_default_str();
  run->add_flag("--quiet,-q", quiet, "No progress output");
  // Serving-side flags kept for command-line compatibility.
  auto* gpu = run->add_option_group("serving", "Accepted and ignored: configure the model server instead");
  gpu->add_option("--cuda_device,--cuda-device", cuda_device);
  gpu->add_option("--tensor_parallel_size,--tensor-parallel-size", tensor_parallel_size);
  gpu->add_option("--gpu_memory_utilization,--gpu-memory-utilization", gpu_memory_utilization);
  gpu->add_flag("--trust_remote_code,--trust-remote-code", trust_remote_code);

  // generate ----------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Write a dataset as JSONL");
  gen->fallthrough();
  DataFlags gen_data;
  gen_data.add(gen);
  std::string gen_out;
  gen->add_option("-o,--output", gen_out, "Output file (stdout when omitted)");

  // compare -----------------------------------------------------------------
  auto* cmp = app.add_subcommand("compare", "Rank runs under shared cohort bounds");
  cmp->fallthrough();
  std::vector<std::string> summaries;
  std::string cmp_format = "text", cmp_out;
  cmp->add_option("summaries", summaries, "summary.json files")->required()->check(CLI::ExistingFile);
  cmp->add_option("--format", cmp_format)->check(CLI::IsMember({"text", "csv", "json"}))->capture_default_str();
  cmp->add_option("-o,--output", cmp_out, "Output file (stdout when omitted)");

  // extract -----------------------------------------------------------------
  auto* ext = app.add_subcommand("extract", "Parse the final answer from a response");
  std::string ext_task, ext_text;
  std::vector<std::int64_t> ext_numbers;
  ext->add_option("--task", ext_task)->required();
  ext->add_option("--numbers", ext_numbers, "Prompt numbers (num1 num2 for pair tasks)");
  ext->add_option("--text", ext_text, "Response text (stdin when omitted)");

  // templates ---------------------------------------------------------------
  auto* tpl = app.add_subcommand("templates", "Print the built-in prompt templates");
  std::string tpl_out;
  tpl->add_option("-o,--output", tpl_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (*run) {
      for (const char* flag : {"--cuda_device", "--tensor_parallel_size", "--gpu_memory_utilization",
                               "--trust_remote_code"}) {
        if (run->count(flag) > 0) {
          std::cerr << "warning: " << flag << " is ignored; set it on the model server\n";
        }
      }
      rc.spec = run_data.spec();
      rc.output_dir = output_dir;
      rc.backend.kind = backend_name == "mock" ? BackendKind::kMock : BackendKind::kWire;
      rc.backend.endpoint = endpoint;
      rc.backend.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000));
      rc.backend.system_prompt = system_prompt;
      rc.backend.tokenizer_id = tokenizer;
      rc.mock.tokenizer_id = tokenizer;
      auto script = parse_mock_script(mock_script);
      if (!script) throw ConfigError("unknown mock script '" + mock_script + "'");
      rc.mock.script = *script;
      if (rc.backend.kind == BackendKind::kWire && model_id.empty()) {
        throw ConfigError("--model_id is required with the openai backend");
      }
      rc.backend.model_id = model_id.empty() ? "mock-" + std::string(mock_script_name(rc.mock.script)) : model_id;
      if (templates_path) {
        rc.templates = TemplateSet::from_file(*templates_path);
        rc.templates_path = templates_path;
      }
      if (!bounds.empty()) rc.bounds = NormalizationBounds{bounds.at(0), bounds.at(1)};

      ProgressFn progress;
      if (!quiet) {
        progress = [](const ProgressEvent& e) {
          if (!e.metrics) return;
          std::fprintf(stderr, "[%s] fold %d/%d  accuracy %.3f  tokens %.1f  failures %d\n",
                       e.key.label().c_str(), e.fold + 1, e.folds, e.metrics->accuracy, e.metrics->mean_tokens,
                       e.metrics->failures);
        };
      }
      auto bundle = run_and_report(rc, nullptr, progress);
      std::cout << summary_text(bundle);
      std::cerr << "reports in " << (rc.output_dir / bundle.meta.run_id).string() << "\n";
    } else if (*gen) {
      auto dataset = generate_dataset(gen_data.spec());
      write_text(gen_out, serialize_dataset(dataset));
      std::cerr << "seed " << dataset.seed << "\n";
    } else if (*cmp) {
      std::vector<std::filesystem::path> paths(summaries.begin(), summaries.end());
      auto board = compare_models(paths);
      if (cmp_format != "text") {
        for (const auto& w : board.warnings) std::cerr << "warning: " << w << "\n";
      }
      if (cmp_format == "csv") {
        write_text(cmp_out, board.to_csv());
      } else if (cmp_format == "json") {
        write_text(cmp_out, board.to_json().dump(2) + "\n");
      } else {
        write_text(cmp_out, board.to_text());
      }
    } else if (*ext) {
      auto task = parse_task(ext_task);
      if (!task) throw ConfigError("unknown task '" + ext_task + "'");
      Payload payload;
      if (payload_shape(*task) == PayloadShape::kPair) {
        if (ext_numbers.size() != 2) throw ConfigError("pair tasks need --numbers NUM1 NUM2");
        payload = IntPair{ext_numbers[0], ext_numbers[1]};
      } else {
        payload = IntList{ext_numbers};
      }
      const std::string text = ext->count("--text") ? ext_text : read_stdin();
      auto result = extract(text, *task, payload);
      nlohmann::ordered_json out;
      if (result.answer) {
        out["answer"] = answer_to_json(result.answer->value);
        out["text"] = answer_to_text(result.answer->value);
        out["tier"] = tier_name(result.answer->tier);
        out["span"] = result.answer->raw_span;
      } else {
        out["answer"] = nullptr;
      }
      out["instruction_followed"] = result.boxed_present;
      out["rejected"] = nlohmann::ordered_json::array();
      for (const auto& [tier, reason] : result.rejected) {
        out["rejected"].push_back({{"tier", tier_name(tier)}, {"reason", reason_name(reason)}});
      }
      std::cout << out.dump(2) << "\n";
    } else if (*tpl) {
      write_text(tpl_out, TemplateSet::defaults().to_json());
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfig);
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kBackend);
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kUnexpected);
  }
  return 0;
}
