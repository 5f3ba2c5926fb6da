#include "doctest.h"

#include <cmath>

#include "thinkbench/errors.hpp"
#include "thinkbench/metrics.hpp"
#include "thinkbench/rng.hpp"

using namespace thinkbench;

namespace {

SampleRecord rec(bool correct, bool followed, std::int64_t tokens, bool failed = false) {
  SampleRecord r;
  r.correct = correct;
  r.instruction_followed = followed;
  r.tokens = tokens;
  r.words = tokens / 2;
  r.chars = tokens * 4;
  if (failed) r.failure = RequestFailure{FailureKind::kBackend, "x"};
  return r;
}

double unit(Xoshiro256& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

}  // namespace

TEST_CASE("judging") {
  CHECK(judge_correct(TaskKind::kDivision, AnswerValue(Decimal{Rational(7, 2)}), Rational(7, 2)));
  CHECK(judge_correct(TaskKind::kMean, AnswerValue(Decimal{Rational(1233, 100)}), Rational(37, 3)));
  CHECK_FALSE(judge_correct(TaskKind::kMean, AnswerValue(Decimal{Rational(1234, 100)}), Rational(37, 3)));
  CHECK(judge_correct(TaskKind::kDivision, AnswerValue(Decimal{Rational(333333, 1000000)}), Rational(1, 3)));
  CHECK(judge_correct(TaskKind::kMedian, AnswerValue(BigInt(3)), Rational(3)));
  CHECK_FALSE(judge_correct(TaskKind::kComparison, AnswerValue(Relation::kLess), Relation::kGreater));
  CHECK(judge_correct(TaskKind::kSum, AnswerValue(Decimal{Rational(12)}), BigInt(12)));
  CHECK_FALSE(judge_correct(TaskKind::kSum, AnswerValue(Decimal{Rational(25, 2)}), BigInt(12)));
  CHECK(judge_correct(TaskKind::kMode, AnswerValue(IntSet{{2, 3}}), IntSet{{2, 3}}));
  CHECK_FALSE(judge_correct(TaskKind::kMode, AnswerValue(IntSet{{2}}), IntSet{{2, 3}}));
  // Right elements, wrong order.
  CHECK_FALSE(judge_correct(TaskKind::kSorting, AnswerValue(IntList{{2, 1}}), IntList{{1, 2}}));
  CHECK_FALSE(judge_correct(TaskKind::kSum, std::nullopt, BigInt(1)));
  CHECK_FALSE(judge_correct(TaskKind::kSum, AnswerValue(IntList{{1}}), BigInt(1)));
  // Relative tolerance scales with the truth.
  CHECK(judge_correct(TaskKind::kDivision, AnswerValue(Decimal{Rational(100005, 1)}), Rational(100000)));
  CHECK_FALSE(judge_correct(TaskKind::kDivision, AnswerValue(Decimal{Rational(100020, 1)}), Rational(100000)));
}

TEST_CASE("fold metrics") {
  auto m = fold_metrics({rec(true, true, 100), rec(true, true, 300), rec(false, true, 200)});
  CHECK(m.accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(m.instruction_following == 1.0);
  CHECK(m.mean_tokens == 200.0);
  CHECK(m.sample_count == 3);
  CHECK_THROWS_AS(fold_metrics({}), ConfigError);

  auto f = fold_metrics({rec(true, true, 100), rec(false, false, 0, true)});
  CHECK(f.accuracy == 0.5);
  CHECK(f.failures == 1);
  CHECK(f.mean_tokens == 100.0);  // failed requests have no verbosity
}

TEST_CASE("token efficiency") {
  NormalizationBounds b{0, 1000};
  CHECK(token_efficiency(500, b) == 0.5);
  CHECK(token_efficiency(0, b) == 1.0);
  CHECK(token_efficiency(1000, b) == 0.0);
  CHECK(token_efficiency(2000, b) == 0.0);
  CHECK(token_efficiency(250, NormalizationBounds{300, 300}) == 1.0);
  CHECK(token_efficiency(200, NormalizationBounds{200, 600}) == 1.0);
  CHECK(token_efficiency(600, NormalizationBounds{200, 600}) == 0.0);
  CHECK_THROWS_AS((NormalizationBounds{5, 1}.validate()), ConfigError);
}

TEST_CASE("overthinking score") {
  CHECK(overthinking_score(1, 1) == 1.0);
  CHECK(overthinking_score(0, 0.9) == 0.0);
  CHECK(overthinking_score(0, 0) == 0.0);
  CHECK(std::abs(overthinking_score(0.8, 0.5) - 0.8 / 1.3) < 1e-12);
}

TEST_CASE("overthinking score properties") {
  Xoshiro256 rng(3);
  for (int i = 0; i < 20000; ++i) {
    double a = unit(rng), e = unit(rng), d = unit(rng) * 0.1;
    double o = overthinking_score(a, e);
    CHECK(o >= 0.0);
    CHECK(o <= 1.0);
    CHECK(o == doctest::Approx(overthinking_score(e, a)));
    CHECK(o <= (a + e) / 2 + 1e-12);
    CHECK(o <= 2 * std::min(a, e) + 1e-12);
    CHECK(overthinking_score(a, a) == doctest::Approx(a));
    CHECK(overthinking_score(std::min(1.0, a + d), e) >= o - 1e-12);
    CHECK(overthinking_score(a, std::min(1.0, e + d)) >= o - 1e-12);
  }
}

TEST_CASE("token efficiency properties") {
  Xoshiro256 rng(4);
  for (int i = 0; i < 5000; ++i) {
    double lo = unit(rng) * 500, hi = lo + unit(rng) * 1000 + 1;
    NormalizationBounds b{lo, hi};
    double t1 = unit(rng) * 2000, t2 = t1 + unit(rng) * 100;
    double e1 = token_efficiency(t1, b), e2 = token_efficiency(t2, b);
    CHECK(e1 >= 0.0);
    CHECK(e1 <= 1.0);
    CHECK(e2 <= e1);
    if (t1 > lo && t2 < hi && t2 > t1) CHECK(e2 < e1);
  }
}

TEST_CASE("aggregation across folds") {
  FoldMetrics a, b;
  a.accuracy = 0.6;
  b.accuracy = 0.8;
  a.mean_tokens = 100;
  b.mean_tokens = 300;
  auto t = aggregate_folds(ConfigKey{TaskKind::kSum, 8}, {a, b}, NormalizationBounds{0, 400});
  CHECK(t.accuracy.mean == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(t.accuracy.std == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(t.token_efficiency == 0.5);
  CHECK(t.overthinking_score == doctest::Approx(overthinking_score(0.7, 0.5)));

  auto single = aggregate_folds(ConfigKey{TaskKind::kSum, 8}, {a}, NormalizationBounds{0, 400});
  CHECK(single.accuracy.std == 0.0);
  auto same = aggregate_folds(ConfigKey{TaskKind::kSum, 8}, {a, a, a}, NormalizationBounds{0, 400});
  CHECK(same.accuracy.mean == a.accuracy);
  CHECK(same.accuracy.std == 0.0);
  CHECK_THROWS_AS(aggregate_folds(ConfigKey{}, {}, NormalizationBounds{0, 1}), ConfigError);
}

TEST_CASE("padding lowers efficiency but not accuracy") {
  std::vector<SampleRecord> concise, padded;
  for (int i = 0; i < 10; ++i) {
    concise.push_back(rec(i % 3 != 0, true, 50 + i));
    padded.push_back(rec(i % 3 != 0, true, 50 + i + 40));
  }
  NormalizationBounds b{0, 4096};
  auto c = aggregate_folds(ConfigKey{}, {fold_metrics(concise)}, b);
  auto p = aggregate_folds(ConfigKey{}, {fold_metrics(padded)}, b);
  CHECK(c.accuracy.mean == p.accuracy.mean);
  CHECK(p.token_efficiency < c.token_efficiency);
  CHECK(p.overthinking_score < c.overthinking_score);
}
