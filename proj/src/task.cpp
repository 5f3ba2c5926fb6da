#include "thinkbench/task.hpp"

namespace thinkbench {

std::string_view task_name(TaskKind t) {
  switch (t) {
    case TaskKind::kSorting: return "sorting";
    case TaskKind::kComparison: return "comparison";
    case TaskKind::kSum: return "sum";
    case TaskKind::kMultiplication: return "multiplication";
    case TaskKind::kDivision: return "division";
    case TaskKind::kSubtraction: return "subtraction";
    case TaskKind::kAbsoluteDifference: return "absolute_difference";
    case TaskKind::kFindMaximum: return "find_maximum";
    case TaskKind::kFindMinimum: return "find_minimum";
    case TaskKind::kMean: return "mean";
    case TaskKind::kMedian: return "median";
    case TaskKind::kMode: return "mode";
    case TaskKind::kOddCount: return "odd_count";
    case TaskKind::kEvenCount: return "even_count";
  }
  return "";
}

std::optional<TaskKind> parse_task(std::string_view name) {
  for (TaskKind t : kAllTasks) {
    if (task_name(t) == name) return t;
  }
  return std::nullopt;
}

PayloadShape payload_shape(TaskKind t) {
  switch (t) {
    case TaskKind::kComparison:
    case TaskKind::kDivision:
    case TaskKind::kSubtraction:
    case TaskKind::kAbsoluteDifference:
      return PayloadShape::kPair;
    default:
      return PayloadShape::kList;
  }
}

AnswerShape answer_shape(TaskKind t) {
  switch (t) {
    case TaskKind::kSorting: return AnswerShape::kList;
    case TaskKind::kComparison: return AnswerShape::kRelation;
    case TaskKind::kMode: return AnswerShape::kSet;
    case TaskKind::kDivision:
    case TaskKind::kMean:
    case TaskKind::kMedian:
      return AnswerShape::kNumber;
    default:
      return AnswerShape::kInteger;
  }
}

bool filters_input_echo(TaskKind t) {
  switch (t) {
    case TaskKind::kSum:
    case TaskKind::kMultiplication:
    case TaskKind::kDivision:
    case TaskKind::kSubtraction:
    case TaskKind::kAbsoluteDifference:
    case TaskKind::kMean:
      return true;
    default:
      return false;
  }
}

}  // namespace thinkbench
