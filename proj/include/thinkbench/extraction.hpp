#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "thinkbench/taskgen.hpp"

namespace thinkbench {

// Extraction tiers in priority order.
enum class Tier { kBoxed, kExplicit, kContextual, kFallback };

std::string_view tier_name(Tier t);
std::optional<Tier> parse_tier(std::string_view s);

using AnswerValue = std::variant<BigInt, Decimal, IntList, Relation, IntSet>;
using Numeric = std::variant<BigInt, Decimal>;

struct ParsedAnswer {
  AnswerValue value;
  Tier tier = Tier::kFallback;
  std::string raw_span;
};

enum class InvalidReason { kNone, kInputEcho, kElementMismatch, kShapeMismatch };

std::string_view reason_name(InvalidReason r);

struct ValidationResult {
  bool valid = true;
  InvalidReason reason = InvalidReason::kNone;

  static ValidationResult ok() { return {}; }
  static ValidationResult fail(InvalidReason r) { return {false, r}; }
};

// Contents of every balanced \boxed{...}, last box first. Unbalanced boxes
// are skipped.
std::vector<std::string> extract_boxed(std::string_view text);

// Parses one numeric literal: plain or comma-grouped integers, decimals,
// scientific notation (2.5e3, 2.5 \times 10^{3}), \frac{a}{b} and a/b.
// LaTeX wrappers, $...$, emphasis and surrounding punctuation are stripped.
// Literals with a fractional part, fractions and non-integral exponent forms
// become Decimal; everything else BigInt. Never throws.
std::optional<Numeric> normalize_numeric(std::string_view span);

// Parses `span` into the answer shape of `task`, or nullopt.
std::optional<AnswerValue> parse_span(TaskKind task, std::string_view span);

ValidationResult validate_answer(TaskKind task, const AnswerValue& parsed,
                                 const Payload& payload, Tier tier);

// Full record of one extraction.
struct Extraction {
  std::optional<ParsedAnswer> answer;
  // A non-placeholder \boxed{} whose content parses into the task's shape.
  bool boxed_present = false;
  // Candidates that parsed but failed validation, in the order tried.
  std::vector<std::pair<Tier, InvalidReason>> rejected;
};

Extraction extract(std::string_view text, TaskKind task, const Payload& payload);

inline std::optional<ParsedAnswer> extract_answer(std::string_view text, TaskKind task,
                                                  const Payload& payload) {
  return extract(text, task, payload).answer;
}

// {"kind": "integer"|"decimal"|"list"|"relation"|"set", "value"|"values": ...}
// Decimals are written as exact "n/d" rationals.
nlohmann::ordered_json answer_to_json(const AnswerValue& value);
std::optional<AnswerValue> answer_from_json(const nlohmann::json& j);
std::string answer_to_text(const AnswerValue& value);

}  // namespace thinkbench
