#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "thinkbench/taskgen.hpp"

namespace thinkbench {

struct SamplingParams {
  double temperature = 0.7;
  double top_p = 1.0;
  int max_tokens = 512;

  void validate() const;  // throws ConfigError
};

enum class BackendKind { kWire, kMock };

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::string endpoint;  // base URL of an OpenAI-compatible server, e.g. http://host:8000/v1
  std::string model_id;
  std::string api_key_env = "OPENAI_API_KEY";  // name of the variable holding the key
  std::chrono::milliseconds timeout{120'000};
  int max_retries = 3;
  int max_in_flight = 8;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_cap{30'000};
  std::optional<std::string> system_prompt;
  std::optional<std::string> tokenizer_id;

  void validate() const;  // throws ConfigError
};

enum class TokenSource { kServer, kTokenizer, kWordEstimate };

std::string_view token_source_name(TokenSource s);

struct ModelResponse {
  std::string text;
  std::int64_t token_count = 0;
  TokenSource token_source = TokenSource::kWordEstimate;
  std::int64_t word_count = 0;
  std::int64_t char_count = 0;
  std::chrono::duration<double> latency{0};
  bool truncated = false;
  int attempts = 1;
};

struct CompletionRequest {
  std::string prompt;
  SamplingParams params;
  // Scripted backends read the instance; wire backends ignore it.
  const ProblemInstance* instance = nullptr;
};

// Result of one attempt against a backend.
struct RawCompletion {
  std::string text;
  std::optional<std::int64_t> completion_tokens;  // server-reported
  bool truncated = false;
};

class Backend {
 public:
  virtual ~Backend() = default;
  // One attempt. Throws BackendError (see retryable()), ProtocolError or
  // TimeoutError. Must be safe to call concurrently.
  virtual RawCompletion attempt(const CompletionRequest& request) = 0;
  virtual std::string identity() const = 0;
};

// ---------------------------------------------------------------------------
// Token counting

using TokenCounter = std::function<std::int64_t(std::string_view)>;

// Process-wide tokenizer registry keyed by id. The built-in
// "regex-pretokenizer" counts GPT-2 style pre-tokens (letter runs, digit
// runs, single punctuation marks).
void register_tokenizer(const std::string& id, TokenCounter counter);
bool has_tokenizer(const std::string& id);

std::pair<std::int64_t, TokenSource> count_tokens(std::string_view text,
                                                  const std::optional<std::string>& tokenizer_id = std::nullopt);

struct Verbosity {
  std::int64_t words = 0;
  std::int64_t chars = 0;
};

// Words are maximal runs of non-whitespace; chars are Unicode scalar values.
Verbosity measure_verbosity(std::string_view text);

// ---------------------------------------------------------------------------
// Completion

// One request with retries and exponential backoff. Throws the last error
// once retries are exhausted.
ModelResponse complete(const CompletionRequest& request, Backend& backend,
                       const BackendConfig& config);

inline ModelResponse complete(std::string_view prompt, const SamplingParams& params,
                              Backend& backend, const BackendConfig& config) {
  return complete(CompletionRequest{std::string(prompt), params, nullptr}, backend, config);
}

enum class FailureKind { kBackend, kProtocol, kTimeout };
std::string_view failure_kind_name(FailureKind k);

struct RequestFailure {
  FailureKind kind = FailureKind::kBackend;
  std::string message;
};

using CompletionOutcome = std::variant<ModelResponse, RequestFailure>;

// Runs all requests with at most config.max_in_flight in flight. outcome[i]
// always belongs to requests[i], whatever the completion order.
std::vector<CompletionOutcome> complete_batch(const std::vector<CompletionRequest>& requests,
                                              Backend& backend, const BackendConfig& config);

// ---------------------------------------------------------------------------
// Backends

// OpenAI-compatible chat completions over HTTP(S).
class WireBackend : public Backend {
 public:
  explicit WireBackend(BackendConfig config);
  RawCompletion attempt(const CompletionRequest& request) override;
  std::string identity() const override;

  // Request body for `request` (exposed for tests).
  std::string request_body(const CompletionRequest& request) const;
  // Parses a chat-completions reply. Throws ProtocolError.
  static RawCompletion parse_reply(std::string_view body);

 private:
  BackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

enum class MockScript {
  kPerfect,  // concise, boxed, correct
  kPadded,   // same answer after pad_factor x the words of kPerfect
  kWrong,    // boxed, always incorrect
  kChaos,    // correct values in rotating unboxed formats
  kFixed,    // fixed_text verbatim
};

std::string_view mock_script_name(MockScript s);
std::optional<MockScript> parse_mock_script(std::string_view s);

struct MockOptions {
  MockScript script = MockScript::kPerfect;
  int pad_factor = 10;
  std::string fixed_text;
  // Requests whose instance hashes below this fraction fail on every attempt.
  double fail_rate = 0.0;
  std::uint64_t fail_seed = 0;
  // Every request fails this many times before succeeding.
  int transient_failures = 0;
  std::optional<std::string> tokenizer_id;
};

// Scripted backend. Needs the instance on each request (except kFixed).
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockOptions options);
  RawCompletion attempt(const CompletionRequest& request) override;
  std::string identity() const override;

  // The untruncated scripted text for an instance.
  std::string script_text(const ProblemInstance& instance) const;
  // Whether `instance` is selected for a persistent injected failure.
  bool injected_failure(const ProblemInstance& instance) const;
  std::int64_t attempts_seen() const { return attempts_.load(); }

  static constexpr int kChaosStyles = 6;
  // Index of the chaos style used for an instance, and whether that style
  // only surfaces through the lowest extraction tier.
  static int chaos_style(const ProblemInstance& instance);
  static bool chaos_style_is_fallback(int style) { return style == kChaosStyles - 1; }

 private:
  MockOptions options_;
  std::atomic<std::int64_t> attempts_{0};
  std::mutex mutex_;
  std::map<std::string, int> failures_by_request_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config, const MockOptions& mock = {});

}  // namespace thinkbench
