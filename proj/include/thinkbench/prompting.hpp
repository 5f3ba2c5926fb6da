#pragma once

#include <map>
#include <string>
#include <string_view>

#include "thinkbench/taskgen.hpp"

namespace thinkbench {

// A prompt is `body + separator + answer_instruction`. Placeholders:
//   {list}  the payload as "[a, b, c]" (pair payloads render as "[a, b]")
//   {num1}  first number of a pair payload
//   {num2}  second number of a pair payload
struct PromptTemplate {
  TaskKind task = TaskKind::kSum;
  std::string body;
  std::string separator = "\n";
  std::string answer_instruction;
};

class TemplateSet {
 public:
  // The built-in template for every task.
  static TemplateSet defaults();
  // Reads {"version": 1, "templates": [{task, body, separator, answer_instruction}]}.
  // Entries override the defaults for their task. Throws ConfigError.
  static TemplateSet from_json(std::string_view text);
  static TemplateSet from_file(const std::string& path);

  const PromptTemplate& at(TaskKind task) const;
  bool contains(TaskKind task) const { return templates_.count(task) != 0; }
  void set(PromptTemplate t);

  std::string to_json() const;

 private:
  std::map<TaskKind, PromptTemplate> templates_;
};

std::string render_prompt(const ProblemInstance& instance,
                          const TemplateSet& templates = TemplateSet::defaults());

}  // namespace thinkbench
