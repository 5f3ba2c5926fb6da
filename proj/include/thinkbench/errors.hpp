#pragma once

#include <stdexcept>
#include <string>

namespace thinkbench {

// Invalid user configuration (task spec, CLI flags, templates).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model backend failed to produce a response. Retryable errors (network
// failures, HTTP 429/5xx, timeouts) are retried by the client.
class BackendError : public std::runtime_error {
 public:
  explicit BackendError(const std::string& what, bool retryable = true)
      : std::runtime_error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// The server answered, but not with a well-formed chat-completions reply.
class ProtocolError : public BackendError {
 public:
  explicit ProtocolError(const std::string& what) : BackendError(what, false) {}
};

class TimeoutError : public BackendError {
 public:
  explicit TimeoutError(const std::string& what) : BackendError(what, true) {}
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Process exit codes used by the CLI.
enum class ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfig = 2,
  kBackend = 3,
  kIo = 4,
};

}  // namespace thinkbench
