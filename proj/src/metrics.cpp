#include "thinkbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "thinkbench/errors.hpp"

namespace thinkbench {

namespace {

std::optional<Rational> as_rational(const AnswerValue& v) {
  if (auto* i = std::get_if<BigInt>(&v)) return Rational(*i);
  if (auto* d = std::get_if<Decimal>(&v)) return d->value;
  return std::nullopt;
}

}  // namespace

bool judge_correct(TaskKind task, const std::optional<AnswerValue>& parsed, const GroundTruth& truth,
                   const TolerancePolicy& policy) {
  if (!parsed) return false;
  const AnswerValue& p = *parsed;
  switch (answer_shape(task)) {
    case AnswerShape::kInteger: {
      auto* t = std::get_if<BigInt>(&truth);
      auto r = as_rational(p);
      return t && r && *r == Rational(*t);
    }
    case AnswerShape::kNumber: {
      auto* t = std::get_if<Rational>(&truth);
      auto r = as_rational(p);
      if (!t || !r) return false;
      if (*r == round_to_places(*t, policy.round_places)) return true;
      double diff = abs(*r - *t).convert_to<double>();
      double scale = abs(*t).convert_to<double>();
      return diff <= std::max(policy.abs_tol, policy.rel_tol * scale);
    }
    case AnswerShape::kList: {
      auto* t = std::get_if<IntList>(&truth);
      auto* l = std::get_if<IntList>(&p);
      return t && l && t->values == l->values;
    }
    case AnswerShape::kRelation: {
      auto* t = std::get_if<Relation>(&truth);
      auto* l = std::get_if<Relation>(&p);
      return t && l && *t == *l;
    }
    case AnswerShape::kSet: {
      auto* t = std::get_if<IntSet>(&truth);
      auto* l = std::get_if<IntSet>(&p);
      return t && l && t->values == l->values;
    }
  }
  return false;
}

SampleRecord score_response(const ProblemInstance& instance, const ModelResponse& response,
                            const TolerancePolicy& policy) {
  SampleRecord r;
  r.task = instance.task;
  r.list_size = instance.list_size;
  r.fold = instance.fold;
  r.index = instance.index;
  r.response_text = response.text;
  r.tokens = response.token_count;
  r.token_source = response.token_source;
  r.words = response.word_count;
  r.chars = response.char_count;
  r.truncated = response.truncated;
  r.latency_s = response.latency.count();
  r.attempts = response.attempts;

  Extraction ex = extract(response.text, instance.task, instance.payload);
  r.parsed = std::move(ex.answer);
  r.rejected = std::move(ex.rejected);
  r.instruction_followed = ex.boxed_present;
  std::optional<AnswerValue> value;
  if (r.parsed) value = r.parsed->value;
  r.correct = judge_correct(instance.task, value, instance.truth, policy);
  return r;
}

SampleRecord failed_record(const ProblemInstance& instance, const RequestFailure& failure) {
  SampleRecord r;
  r.task = instance.task;
  r.list_size = instance.list_size;
  r.fold = instance.fold;
  r.index = instance.index;
  r.failure = failure;
  return r;
}

void NormalizationBounds::validate() const {
  if (!(t_min >= 0.0) || !(t_max >= t_min) || !std::isfinite(t_max)) {
    throw ConfigError("normalization bounds need 0 <= t_min <= t_max");
  }
}

Stat mean_std(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / n);
  return s;
}

FoldMetrics fold_metrics(const std::vector<SampleRecord>& records) {
  if (records.empty()) throw ConfigError("cannot compute metrics for an empty fold");
  FoldMetrics m;
  m.fold = records.front().fold;
  m.sample_count = static_cast<int>(records.size());
  int correct = 0, followed = 0, truncated = 0;
  double tokens = 0, words = 0, chars = 0;
  for (const auto& r : records) {
    if (r.correct) ++correct;
    if (r.instruction_followed) ++followed;
    if (r.parsed) {
      ++m.tiers[static_cast<std::size_t>(r.parsed->tier)];
    } else {
      ++m.tiers[4];
    }
    if (r.failure) {
      ++m.failures;
      continue;
    }
    if (r.truncated) ++truncated;
    tokens += static_cast<double>(r.tokens);
    words += static_cast<double>(r.words);
    chars += static_cast<double>(r.chars);
  }
  double n = static_cast<double>(m.sample_count);
  m.accuracy = correct / n;
  m.instruction_following = followed / n;
  int answered = m.sample_count - m.failures;
  if (answered > 0) {
    double a = static_cast<double>(answered);
    m.mean_tokens = tokens / a;
    m.mean_words = words / a;
    m.mean_chars = chars / a;
    m.truncated_fraction = truncated / a;
  }
  return m;
}

double token_efficiency(double mean_tokens, const NormalizationBounds& bounds) {
  if (bounds.t_max <= bounds.t_min) return 1.0;
  double e = 1.0 - (mean_tokens - bounds.t_min) / (bounds.t_max - bounds.t_min);
  return std::clamp(e, 0.0, 1.0);
}

double overthinking_score(double accuracy, double efficiency) {
  double s = accuracy + efficiency;
  if (s <= 0.0) return 0.0;
  return 2.0 * accuracy * efficiency / s;
}

TaskMetrics aggregate_folds(const ConfigKey& key, const std::vector<FoldMetrics>& folds,
                            const NormalizationBounds& bounds) {
  if (folds.empty()) throw ConfigError("cannot aggregate zero folds");
  bounds.validate();
  TaskMetrics t;
  t.key = key;
  t.folds = static_cast<int>(folds.size());
  std::vector<double> acc, ifr, tok, wrd, chr, trn;
  for (const auto& f : folds) {
    t.sample_count += f.sample_count;
    t.failures += f.failures;
    acc.push_back(f.accuracy);
    ifr.push_back(f.instruction_following);
    tok.push_back(f.mean_tokens);
    wrd.push_back(f.mean_words);
    chr.push_back(f.mean_chars);
    trn.push_back(f.truncated_fraction);
    for (std::size_t i = 0; i < t.tiers.size(); ++i) t.tiers[i] += f.tiers[i];
  }
  t.accuracy = mean_std(acc);
  t.instruction_following = mean_std(ifr);
  t.tokens = mean_std(tok);
  t.words = mean_std(wrd);
  t.chars = mean_std(chr);
  t.truncated_fraction = mean_std(trn);
  t.bounds = bounds;
  t.token_efficiency = token_efficiency(t.tokens.mean, bounds);
  t.overthinking_score = overthinking_score(t.accuracy.mean, t.token_efficiency);
  return t;
}

}  // namespace thinkbench
