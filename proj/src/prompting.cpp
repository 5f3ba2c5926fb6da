#include "thinkbench/prompting.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "thinkbench/errors.hpp"

namespace thinkbench {
namespace {

constexpr std::string_view kList = "{list}";
constexpr std::string_view kNum1 = "{num1}";
constexpr std::string_view kNum2 = "{num2}";

bool has(std::string_view text, std::string_view needle) {
  return text.find(needle) != std::string_view::npos;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

void check_template(const PromptTemplate& t) {
  const std::string name(task_name(t.task));
  if (!has(t.answer_instruction, "\\boxed{")) {
    throw ConfigError("template for " + name + " lacks a \\boxed{ instruction");
  }
  const std::string whole = t.body + t.separator + t.answer_instruction;
  if (payload_shape(t.task) == PayloadShape::kList) {
    if (!has(whole, kList)) throw ConfigError("template for " + name + " must use {list}");
    if (has(whole, kNum1) || has(whole, kNum2)) {
      throw ConfigError("template for " + name + " uses pair placeholders on a list task");
    }
  } else if (!has(whole, kList) && !(has(whole, kNum1) && has(whole, kNum2))) {
    throw ConfigError("template for " + name + " must use {num1} and {num2}, or {list}");
  }
}

PromptTemplate make(TaskKind task, std::string body, std::string instruction,
                    std::string separator = "\n") {
  return PromptTemplate{task, std::move(body), std::move(separator), std::move(instruction)};
}

TemplateSet build_defaults() {
  const std::string boxed_end = "Your final answer must be in the format \\boxed{answer} at the end.";
  TemplateSet set;
  set.set(make(TaskKind::kSum, "Add the following list of numbers:\n{list}",
               "Provide the sum. " + boxed_end));
  set.set(make(TaskKind::kSorting, "Sort the following list of numbers in ascending order:\n{list}",
               "Provide the sorted list. " + boxed_end));
  set.set(make(TaskKind::kComparison,
               "Compare the following two numbers and determine their relationship:\n"
               "Number 1: {num1}\nNumber 2: {num2}",
               "Is Number 1 greater than, less than, or equal to Number 2? Your final answer "
               "must be in the format \\boxed{relation} at the end, where 'relation' is one of: "
               "'greater than', 'less than', or 'equal to'."));
  set.set(make(TaskKind::kSubtraction, "Can you subtract {num1} from {num2}",
               "and provide your final answer in \\boxed{answer} format at the end of your response.",
               " "));
  set.set(make(TaskKind::kAbsoluteDifference,
               "Find the absolute difference between the following list of numbers:\n{list}",
               "Provide the result. " + boxed_end));
  set.set(make(TaskKind::kMultiplication, "Multiply the following list of numbers:\n{list}",
               "Provide the product. " + boxed_end));
  set.set(make(TaskKind::kDivision, "Divide {num1} by {num2}",
               "Provide the answer as a floating point number. " + boxed_end));
  set.set(make(TaskKind::kEvenCount, "Count the even numbers from the following list of numbers:\n{list}",
               "Provide the final count of even numbers. " + boxed_end));
  set.set(make(TaskKind::kOddCount, "Count the odd numbers from the following list of numbers:\n{list}",
               "Provide the final count of odd numbers. " + boxed_end));
  set.set(make(TaskKind::kFindMinimum,
               "Find the minimum number from the given list of numbers. List = {list}.",
               "Your final answer must be in the format \\boxed{minimum} at the end of your response."));
  set.set(make(TaskKind::kFindMaximum,
               "Find the maximum number from the given list of numbers. List = {list}.",
               "Your final answer must be in the format \\boxed{maximum} at the end of your response."));
  set.set(make(TaskKind::kMean,
               "Calculate the mean (average) of the following list of numbers:\n{list}",
               "The mean is the sum of all numbers divided by the count of numbers. Calculate the "
               "exact mean value. Your final answer must be in the format \\boxed{mean value} at the end."));
  set.set(make(TaskKind::kMedian, "Find the median value of the following list of numbers:\n{list}",
               "The median is the middle value when the list is sorted. If there is an even number "
               "of elements, the median is the average of the two middle values. Your final answer "
               "must be in the format \\boxed{median value} at the end."));
  set.set(make(TaskKind::kMode, "Find the mode(s) of the following list of numbers:\n{list}",
               "The mode is the value that appears most frequently. If multiple values appear with "
               "the same highest frequency, return all of them. Your final answer must be in the "
               "format \\boxed{mode(s)} at the end. If there are multiple modes, list them "
               "separated by commas."));
  return set;
}

}  // namespace

void TemplateSet::set(PromptTemplate t) {
  check_template(t);
  templates_[t.task] = std::move(t);
}

TemplateSet TemplateSet::defaults() {
  static const TemplateSet kDefaults = build_defaults();
  return kDefaults;
}

TemplateSet TemplateSet::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("template file is not valid JSON: ") + e.what());
  }
  TemplateSet set = defaults();
  if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_array()) {
    throw ConfigError("template file must hold a \"templates\" array");
  }
  for (const auto& entry : doc["templates"]) {
    if (!entry.is_object()) throw ConfigError("template entries must be objects");
    const auto name = entry.value("task", std::string{});
    const auto task = parse_task(name);
    if (!task) throw ConfigError("template for unknown task '" + name + "'");
    if (!entry.contains("body") || !entry.contains("answer_instruction")) {
      throw ConfigError("template for " + name + " needs body and answer_instruction");
    }
    PromptTemplate t;
    t.task = *task;
    t.body = entry["body"].get<std::string>();
    t.separator = entry.value("separator", std::string("\n"));
    t.answer_instruction = entry["answer_instruction"].get<std::string>();
    set.set(std::move(t));
  }
  return set;
}

TemplateSet TemplateSet::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open template file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

const PromptTemplate& TemplateSet::at(TaskKind task) const {
  auto it = templates_.find(task);
  if (it == templates_.end()) {
    throw ConfigError("no prompt template for task " + std::string(task_name(task)));
  }
  return it->second;
}

std::string TemplateSet::to_json() const {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["templates"] = nlohmann::ordered_json::array();
  for (TaskKind task : kAllTasks) {
    auto it = templates_.find(task);
    if (it == templates_.end()) continue;
    nlohmann::ordered_json e;
    e["task"] = task_name(task);
    e["body"] = it->second.body;
    e["separator"] = it->second.separator;
    e["answer_instruction"] = it->second.answer_instruction;
    doc["templates"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

std::string render_prompt(const ProblemInstance& instance, const TemplateSet& templates) {
  const PromptTemplate& t = templates.at(instance.task);
  std::string out = t.body + t.separator + t.answer_instruction;
  if (const auto* list = std::get_if<IntList>(&instance.payload)) {
    replace_all(out, kList, render_int_list(list->values));
  } else {
    const auto& p = std::get<IntPair>(instance.payload);
    replace_all(out, kList, render_int_list({p.a, p.b}));
    replace_all(out, kNum1, std::to_string(p.a));
    replace_all(out, kNum2, std::to_string(p.b));
  }
  return out;
}

}  // namespace thinkbench
