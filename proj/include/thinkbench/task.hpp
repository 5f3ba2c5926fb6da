#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace thinkbench {

enum class TaskKind {
  kSorting,
  kComparison,
  kSum,
  kMultiplication,
  kDivision,
  kSubtraction,
  kAbsoluteDifference,
  kFindMaximum,
  kFindMinimum,
  kMean,
  kMedian,
  kMode,
  kOddCount,
  kEvenCount,
};

inline constexpr std::array<TaskKind, 14> kAllTasks = {
    TaskKind::kSorting,      TaskKind::kComparison,         TaskKind::kSum,
    TaskKind::kMultiplication, TaskKind::kDivision,         TaskKind::kSubtraction,
    TaskKind::kAbsoluteDifference, TaskKind::kFindMaximum,  TaskKind::kFindMinimum,
    TaskKind::kMean,         TaskKind::kMedian,             TaskKind::kMode,
    TaskKind::kOddCount,     TaskKind::kEvenCount,
};

// Input payload layout.
enum class PayloadShape { kList, kPair };

// Shape of the expected final answer.
enum class AnswerShape {
  kInteger,   // exact integer
  kNumber,    // integer or decimal (division, mean, median)
  kList,      // ordered integer list
  kRelation,  // greater / less / equal
  kSet,       // unordered integer set
};

std::string_view task_name(TaskKind t);
std::optional<TaskKind> parse_task(std::string_view name);
PayloadShape payload_shape(TaskKind t);
AnswerShape answer_shape(TaskKind t);

// Tasks whose answer is computed from the inputs rather than selected from
// them; a bare input number at the lowest extraction tier is an echo.
bool filters_input_echo(TaskKind t);

}  // namespace thinkbench
