#ifdef THINKBENCH_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "thinkbench/client.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <regex>
#include <shared_mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "thinkbench/errors.hpp"
#include "thinkbench/rng.hpp"

namespace thinkbench {

using json = nlohmann::json;

void SamplingParams::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be a finite value >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must lie in (0, 1]");
  if (max_tokens < 1) throw ConfigError("max_tokens must be at least 1");
}

void BackendConfig::validate() const {
  if (kind == BackendKind::kWire) {
    if (endpoint.empty()) throw ConfigError("an endpoint URL is required for the wire backend");
    if (model_id.empty()) throw ConfigError("a model id is required for the wire backend");
  }
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  if (backoff_base.count() < 0 || backoff_cap.count() < 0) {
    throw ConfigError("backoff durations must be >= 0");
  }
  if (tokenizer_id && !has_tokenizer(*tokenizer_id)) {
    throw ConfigError("unknown tokenizer '" + *tokenizer_id + "'");
  }
}

std::string_view token_source_name(TokenSource s) {
  switch (s) {
    case TokenSource::kServer: return "server";
    case TokenSource::kTokenizer: return "tokenizer";
    case TokenSource::kWordEstimate: return "word-estimate";
  }
  return "";
}

std::string_view failure_kind_name(FailureKind k) {
  switch (k) {
    case FailureKind::kBackend: return "backend";
    case FailureKind::kProtocol: return "protocol";
    case FailureKind::kTimeout: return "timeout";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Token counting

namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::int64_t pretokenize_count(std::string_view text) {
  std::int64_t n = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(c)) {
      ++i;
    } else if (std::isalpha(c) || c >= 0x80) {
      while (i < text.size()) {
        auto d = static_cast<unsigned char>(text[i]);
        if (!(std::isalpha(d) || d >= 0x80)) break;
        ++i;
      }
      ++n;
    } else if (std::isdigit(c)) {
      std::size_t run = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
        ++run;
      }
      n += static_cast<std::int64_t>((run + 2) / 3);
    } else {
      ++i;
      ++n;
    }
  }
  return n;
}

struct TokenizerRegistry {
  std::shared_mutex mutex;
  std::map<std::string, TokenCounter> counters{{"regex-pretokenizer", pretokenize_count}};
};

TokenizerRegistry& registry() {
  static TokenizerRegistry r;
  return r;
}

}  // namespace

void register_tokenizer(const std::string& id, TokenCounter counter) {
  if (id.empty() || !counter) throw ConfigError("tokenizer id and counter must be non-empty");
  auto& r = registry();
  std::unique_lock lock(r.mutex);
  r.counters[id] = std::move(counter);
}

bool has_tokenizer(const std::string& id) {
  auto& r = registry();
  std::shared_lock lock(r.mutex);
  return r.counters.count(id) != 0;
}

std::pair<std::int64_t, TokenSource> count_tokens(std::string_view text,
                                                  const std::optional<std::string>& tokenizer_id) {
  if (tokenizer_id) {
    TokenCounter counter;
    {
      auto& r = registry();
      std::shared_lock lock(r.mutex);
      auto it = r.counters.find(*tokenizer_id);
      if (it == r.counters.end()) throw ConfigError("unknown tokenizer '" + *tokenizer_id + "'");
      counter = it->second;
    }
    return {counter(text), TokenSource::kTokenizer};
  }
  // ceil(words * 4 / 3)
  auto words = measure_verbosity(text).words;
  return {(words * 4 + 2) / 3, TokenSource::kWordEstimate};
}

Verbosity measure_verbosity(std::string_view text) {
  Verbosity v;
  bool in_word = false;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if ((c & 0xC0) != 0x80) ++v.chars;
    if (is_ascii_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++v.words;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Completion

ModelResponse complete(const CompletionRequest& request, Backend& backend,
                       const BackendConfig& config) {
  const int total = 1 + std::max(0, config.max_retries);
  auto start = std::chrono::steady_clock::now();
  for (int attempt = 1;; ++attempt) {
    try {
      RawCompletion raw = backend.attempt(request);
      ModelResponse r;
      r.latency = std::chrono::steady_clock::now() - start;
      r.attempts = attempt;
      r.truncated = raw.truncated;
      if (raw.completion_tokens) {
        r.token_count = *raw.completion_tokens;
        r.token_source = TokenSource::kServer;
      } else {
        std::tie(r.token_count, r.token_source) = count_tokens(raw.text, config.tokenizer_id);
      }
      auto v = measure_verbosity(raw.text);
      r.word_count = v.words;
      r.char_count = v.chars;
      r.text = std::move(raw.text);
      return r;
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= total) throw;
      auto delay = config.backoff_base * (std::int64_t{1} << std::min(attempt - 1, 20));
      std::this_thread::sleep_for(std::min(delay, config.backoff_cap));
    }
  }
}

std::vector<CompletionOutcome> complete_batch(const std::vector<CompletionRequest>& requests,
                                              Backend& backend, const BackendConfig& config) {
  std::vector<CompletionOutcome> out(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        out[i] = complete(requests[i], backend, config);
      } catch (const TimeoutError& e) {
        out[i] = RequestFailure{FailureKind::kTimeout, e.what()};
      } catch (const ProtocolError& e) {
        out[i] = RequestFailure{FailureKind::kProtocol, e.what()};
      } catch (const BackendError& e) {
        out[i] = RequestFailure{FailureKind::kBackend, e.what()};
      }
    }
  };
  std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, config.max_in_flight)), requests.size());
  if (n_threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// WireBackend

WireBackend::WireBackend(BackendConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?)://([^/?#]+)(/[^?#]*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw ConfigError("endpoint must be an http(s) URL: '" + config_.endpoint + "'");
  }
  std::string scheme = m[1].str();
  std::transform(scheme.begin(), scheme.end(), scheme.begin(), ::tolower);
#ifndef THINKBENCH_HAVE_OPENSSL
  if (scheme == "https") throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
  scheme_host_port_ = scheme + "://" + m[2].str();
  std::string path = m[3].str();
  while (!path.empty() && path.back() == '/') path.pop_back();
  static const std::string suffix = "/chat/completions";
  if (path.size() < suffix.size() || path.compare(path.size() - suffix.size(), suffix.size(), suffix) != 0) {
    path += suffix;
  }
  path_ = path;
}

std::string WireBackend::identity() const { return config_.model_id + "@" + scheme_host_port_ + path_; }

std::string WireBackend::request_body(const CompletionRequest& request) const {
  json messages = json::array();
  if (config_.system_prompt) messages.push_back({{"role", "system"}, {"content", *config_.system_prompt}});
  messages.push_back({{"role", "user"}, {"content", request.prompt}});
  json body = {
      {"model", config_.model_id},
      {"messages", messages},
      {"temperature", request.params.temperature},
      {"top_p", request.params.top_p},
      {"max_tokens", request.params.max_tokens},
      {"n", 1},
      {"stream", false},
  };
  return body.dump();
}

RawCompletion WireBackend::parse_reply(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("reply is not a JSON object");
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw ProtocolError("reply has no choices");
  }
  const json& choice = (*choices)[0];
  if (!choice.is_object()) throw ProtocolError("choice is not an object");
  auto message = choice.find("message");
  if (message == choice.end() || !message->is_object()) throw ProtocolError("choice has no message");
  RawCompletion raw;
  auto content = message->find("content");
  if (content == message->end()) throw ProtocolError("message has no content");
  if (content->is_string()) {
    raw.text = content->get<std::string>();
  } else if (!content->is_null()) {
    throw ProtocolError("message content is not a string");
  }
  auto finish = choice.find("finish_reason");
  raw.truncated = finish != choice.end() && finish->is_string() && finish->get<std::string>() == "length";
  auto usage = j.find("usage");
  if (usage != j.end() && usage->is_object()) {
    auto ct = usage->find("completion_tokens");
    if (ct != usage->end() && ct->is_number_integer() && ct->get<std::int64_t>() >= 0) {
      raw.completion_tokens = ct->get<std::int64_t>();
    }
  }
  return raw;
}

RawCompletion WireBackend::attempt(const CompletionRequest& request) {
  httplib::Client cli(scheme_host_port_);
  auto secs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout);
  cli.set_connection_timeout(secs);
  cli.set_read_timeout(secs);
  cli.set_write_timeout(secs);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  auto res = cli.Post(path_, headers, request_body(request), "application/json");
  if (!res) {
    auto err = res.error();
    std::string what = "request to " + scheme_host_port_ + path_ + " failed: " + httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      throw TimeoutError(what);
    }
    throw BackendError(what, true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw BackendError("server returned HTTP " + std::to_string(res->status), true);
  }
  if (res->status != 200) {
    std::string detail = res->body.substr(0, 200);
    throw BackendError("server returned HTTP " + std::to_string(res->status) + ": " + detail, false);
  }
  return parse_reply(res->body);
}

// ---------------------------------------------------------------------------
// MockBackend

std::string_view mock_script_name(MockScript s) {
  switch (s) {
    case MockScript::kPerfect: return "perfect";
    case MockScript::kPadded: return "padded";
    case MockScript::kWrong: return "wrong";
    case MockScript::kChaos: return "chaos";
    case MockScript::kFixed: return "fixed";
  }
  return "";
}

std::optional<MockScript> parse_mock_script(std::string_view s) {
  for (auto m : {MockScript::kPerfect, MockScript::kPadded, MockScript::kWrong, MockScript::kChaos,
                 MockScript::kFixed}) {
    if (mock_script_name(m) == s) return m;
  }
  return std::nullopt;
}

namespace {

std::string request_key(const ProblemInstance& inst) {
  return inst.key().label() + "|" + std::to_string(inst.fold) + "|" + std::to_string(inst.index);
}

// Contains no digits and no relation vocabulary.
constexpr std::string_view kFiller =
    "Let me carefully reason about this problem one step at a time and verify every "
    "intermediate value before committing to a response so that nothing is overlooked";

std::string wrong_text(const ProblemInstance& inst) {
  return std::visit(
      [&](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, BigInt>) {
          return t == 0 ? "1" : "0";
        } else if constexpr (std::is_same_v<T, Rational>) {
          // Far outside any tolerance or rounding window.
          Rational w = abs(t) < 1 ? Rational(t + 1) : Rational(0);
          return rational_to_decimal(w, 6);
        } else if constexpr (std::is_same_v<T, IntList>) {
          auto v = t.values;
          std::reverse(v.begin(), v.end());
          if (v == t.values) {
            if (v.empty()) return "[0]";
            v.front() += 1;
          }
          return render_int_list(v);
        } else if constexpr (std::is_same_v<T, Relation>) {
          switch (t) {
            case Relation::kGreater: return "less than";
            case Relation::kLess: return "equal to";
            case Relation::kEqual: return "greater than";
          }
          return "";
        } else {
          const auto& list = std::get<IntList>(inst.payload).values;
          for (auto x : list) {
            if (!std::binary_search(t.values.begin(), t.values.end(), x)) return std::to_string(x);
          }
          auto mx = list.empty() ? std::int64_t{0} : *std::max_element(list.begin(), list.end());
          return std::to_string(mx + 1);
        }
      },
      inst.truth);
}

}  // namespace

MockBackend::MockBackend(MockOptions options) : options_(std::move(options)) {
  if (options_.pad_factor < 1) throw ConfigError("pad factor must be at least 1");
  if (!(options_.fail_rate >= 0.0 && options_.fail_rate <= 1.0)) {
    throw ConfigError("mock failure rate must lie in [0, 1]");
  }
  if (options_.transient_failures < 0) throw ConfigError("transient failures must be >= 0");
}

std::string MockBackend::identity() const { return "mock:" + std::string(mock_script_name(options_.script)); }

int MockBackend::chaos_style(const ProblemInstance& instance) {
  return static_cast<int>(fnv1a64(request_key(instance)) % kChaosStyles);
}

bool MockBackend::injected_failure(const ProblemInstance& instance) const {
  if (options_.fail_rate <= 0.0) return false;
  SplitMix64 sm(fnv1a64(request_key(instance)) ^ options_.fail_seed);
  double u = static_cast<double>(sm.next() >> 11) * 0x1.0p-53;
  return u < options_.fail_rate;
}

std::string MockBackend::script_text(const ProblemInstance& inst) const {
  const std::string answer = truth_to_text(inst.truth);
  const std::string concise = "The final answer is \\boxed{" + answer + "}.";
  switch (options_.script) {
    case MockScript::kPerfect:
      return concise;
    case MockScript::kPadded: {
      auto concise_words = measure_verbosity(concise).words;
      auto filler_words = concise_words * (options_.pad_factor - 1);
      std::vector<std::string_view> words;
      for (std::size_t i = 0; i < kFiller.size();) {
        auto j = kFiller.find(' ', i);
        if (j == std::string_view::npos) j = kFiller.size();
        words.push_back(kFiller.substr(i, j - i));
        i = j + 1;
      }
      std::string out;
      for (std::int64_t k = 0; k < filler_words; ++k) {
        out += words[static_cast<std::size_t>(k) % words.size()];
        out += (k + 1) % 12 == 0 ? "\n" : " ";
      }
      return out + concise;
    }
    case MockScript::kWrong:
      return "The final answer is \\boxed{" + wrong_text(inst) + "}.";
    case MockScript::kChaos:
      switch (chaos_style(inst)) {
        case 0: return "After working it out, the answer is " + answer + ".";
        case 1: return "Adding everything up carefully.\nFinal Answer: " + answer;
        case 2: return "Here is what I found.\n\n**" + answer + "**";
        case 3: return "Computed value:\n```\n" + answer + "\n```";
        case 4: return "Checking each step.\nTherefore: " + answer;
        default: return "Let me think.\n" + answer;
      }
    case MockScript::kFixed:
      return options_.fixed_text;
  }
  return concise;
}

RawCompletion MockBackend::attempt(const CompletionRequest& request) {
  attempts_.fetch_add(1);
  if (options_.script != MockScript::kFixed && request.instance == nullptr) {
    throw BackendError("the mock backend needs the problem instance", false);
  }
  if (request.instance) {
    const auto& inst = *request.instance;
    if (injected_failure(inst)) throw BackendError("injected failure for " + request_key(inst), true);
    if (options_.transient_failures > 0) {
      std::lock_guard lock(mutex_);
      int& seen = failures_by_request_[request_key(inst)];
      if (seen < options_.transient_failures) {
        ++seen;
        throw BackendError("injected transient failure", true);
      }
    }
  }
  RawCompletion raw;
  raw.text = request.instance ? script_text(*request.instance) : options_.fixed_text;
  // Cut at a word boundary so the counted length stays within max_tokens.
  const auto budget = static_cast<std::int64_t>(request.params.max_tokens);
  if (count_tokens(raw.text, options_.tokenizer_id).first > budget) {
    std::vector<std::size_t> ends;
    bool in_word = false;
    for (std::size_t i = 0; i < raw.text.size(); ++i) {
      bool space = is_ascii_space(static_cast<unsigned char>(raw.text[i]));
      if (!space) in_word = true;
      if (in_word && (space || i + 1 == raw.text.size())) {
        ends.push_back(space ? i : i + 1);
        in_word = false;
      }
    }
    std::size_t lo = 0, hi = ends.size();  // largest k with tokens(prefix k) <= budget
    while (lo < hi) {
      std::size_t mid = (lo + hi + 1) / 2;
      auto n = count_tokens(std::string_view(raw.text).substr(0, ends[mid - 1]), options_.tokenizer_id).first;
      if (n <= budget) lo = mid; else hi = mid - 1;
    }
    raw.text.resize(lo == 0 ? 0 : ends[lo - 1]);
    raw.truncated = true;
  }
  return raw;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, const MockOptions& mock) {
  config.validate();
  if (config.kind == BackendKind::kWire) return std::make_unique<WireBackend>(config);
  MockOptions m = mock;
  if (!m.tokenizer_id) m.tokenizer_id = config.tokenizer_id;
  return std::make_unique<MockBackend>(std::move(m));
}

}  // namespace thinkbench
