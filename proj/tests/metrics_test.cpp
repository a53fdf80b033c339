//
// Copyright 2026 The advtext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "advtext/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "advtext/toybackend.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace advtext {
namespace {

using testing::FromWords;

AttackResult Result(AttackStatus status, std::size_t edits = 0, std::size_t words = 10) {
  AttackResult r;
  r.status = status;
  r.success = status == AttackStatus::success;
  std::vector<std::string> w(words, "w");
  r.original = FromWords(w, 0);
  r.adversarial_text = r.original.text_a;
  for (std::size_t i = 0; i < edits; ++i) r.edits.push_back({i, "w", "x"});
  return r;
}

class CountGrammar : public GrammarOracle {
 public:
  std::size_t error_count(const std::string& text) const override {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '!'));
  }
};

class ThrowingLM : public CausalLMOracle {
 public:
  LogLikelihood log_likelihood(const std::string&) const override { throw std::runtime_error("down"); }
};

TEST(AttackSuccessRateTest, Examples) {
  std::vector<AttackResult> rs;
  for (int i = 0; i < 100; ++i) rs.push_back(Result(i < 82 ? AttackStatus::success : AttackStatus::failed));
  rs.push_back(Result(AttackStatus::skipped));
  EXPECT_DOUBLE_EQ(attack_success_rate(rs), 82.0);

  EXPECT_EQ(attack_success_rate({Result(AttackStatus::failed), Result(AttackStatus::unattackable)}), 0.0);
  EXPECT_THROW(attack_success_rate({Result(AttackStatus::skipped)}), NoAdmittedSamples);
  EXPECT_THROW(attack_success_rate({}), NoAdmittedSamples);
}

TEST(WordManipulationRateTest, Examples) {
  EXPECT_DOUBLE_EQ(word_manipulation_rate(Result(AttackStatus::success, 2, 10)), 0.2);
  EXPECT_EQ(word_manipulation_rate(Result(AttackStatus::failed, 0, 10)), 0.0);
}

TEST(PerplexityTest, Examples) {
  toy::ToyLanguageModel uniform4({}, 4);
  for (const char* t : {"a", "a b c", "The soup was good and warm."})
    EXPECT_NEAR(perplexity(t, uniform4), 4.0, 1e-9) << t;
  toy::ToyLanguageModel certain({{"x", 1.0}, {"y", 1.0}}, 9);
  EXPECT_EQ(perplexity("x y x", certain), 1.0);
  toy::ToyLanguageModel two({{"p", 0.5}, {"q", 0.125}}, 9);
  EXPECT_NEAR(perplexity("p q", two), 4.0, 1e-12);
  EXPECT_THROW(perplexity("", two), std::invalid_argument);
}

TEST(PerplexityTest, WhitespaceInvariant) {
  toy::ToyLanguageModel lm({{"the", 0.08}, {".", 0.1}}, 64);
  EXPECT_EQ(perplexity("The soup  was\tgood .", lm), perplexity("The soup was good .", lm));
}

TEST(SyntacticErrorsTest, Examples) {
  CountGrammar g;
  EXPECT_EQ(syntactic_errors("a!", "a!!!", g), 2u);
  EXPECT_EQ(syntactic_errors("a!!", "a", g), 0u);
  EXPECT_EQ(syntactic_errors("a!", "a!", g), 0u);
}

TEST(SemanticSimilarityMetricTest, Examples) {
  toy::ToyEmbedder e({"good", "bad", "film"});
  EXPECT_EQ(semantic_similarity_metric("good film", "good film", e), 1.0);
  EXPECT_EQ(semantic_similarity_metric("good", "bad", e), 0.0);
}

TEST(ComputeSampleMetricsTest, FailuresGetOnlyWmr) {
  OracleSuite s;
  const auto m = compute_sample_metrics(Result(AttackStatus::failed, 1, 4), s);
  EXPECT_FALSE(m.success);
  EXPECT_DOUBLE_EQ(m.wmr, 0.25);
  EXPECT_FALSE(m.perplexity || m.sye || m.ses);
}

TEST(ComputeSampleMetricsTest, OracleFailureLeavesMetricUnset) {
  OracleSuite s;
  s.lm = std::make_shared<ThrowingLM>();
  s.grammar = std::make_shared<CountGrammar>();
  s.embedder = std::make_shared<toy::ToyEmbedder>(std::set<std::string>{"w", "x"});
  auto r = Result(AttackStatus::success, 1, 4);
  r.adversarial_text = make_text({"x", "w", "w", "w"});
  const auto m = compute_sample_metrics(r, s);
  EXPECT_FALSE(m.perplexity);
  EXPECT_EQ(m.sye, 0u);
  ASSERT_TRUE(m.ses);
  // (4,0) against (3,1)
  EXPECT_NEAR(*m.ses, 3.0 / std::sqrt(10.0), 1e-15);
}

TEST(ComputeSampleMetricsTest, MetricEmbedderOverridesGateEmbedder) {
  OracleSuite s;
  s.lm = std::make_shared<toy::ToyLanguageModel>(std::map<std::string, double>{}, 4);
  s.grammar = std::make_shared<CountGrammar>();
  s.embedder = std::make_shared<toy::ToyEmbedder>(std::set<std::string>{"w", "x"});
  s.metric_embedder = std::make_shared<testing::ConstantEmbedder>(std::vector<double>{1, 2});
  auto r = Result(AttackStatus::success, 1, 4);
  r.adversarial_text = make_text({"x", "w", "w", "w"});
  const auto m = compute_sample_metrics(r, s);
  EXPECT_EQ(*m.ses, 1.0);
  EXPECT_NEAR(*m.perplexity, 4.0, 1e-12);
}

SampleMetrics Metrics(bool success, double wmr, double per = 0, std::size_t sye = 0, double ses = 0) {
  SampleMetrics m;
  m.success = success;
  m.wmr = wmr;
  if (success) {
    m.perplexity = per;
    m.sye = sye;
    m.ses = ses;
  }
  return m;
}

TEST(AggregateTest, MeansOverSuccesses) {
  const auto rep = aggregate({Result(AttackStatus::success), Result(AttackStatus::success)},
                             {Metrics(true, 0.1, 10, 1, 0.8), Metrics(true, 0.3, 20, 0, 0.9)});
  EXPECT_DOUBLE_EQ(rep.mean_wmr, 20.0);
  EXPECT_DOUBLE_EQ(rep.asr, 100.0);
  EXPECT_DOUBLE_EQ(rep.mean_per, 15.0);
  EXPECT_DOUBLE_EQ(rep.mean_sye, 0.5);
  EXPECT_DOUBLE_EQ(rep.mean_ses, 0.85);
}

TEST(AggregateTest, FailuresAndSkipsExcluded) {
  const auto rep = aggregate(
      {Result(AttackStatus::success), Result(AttackStatus::failed), Result(AttackStatus::skipped)},
      {Metrics(true, 0.1, 10, 1, 0.8), Metrics(false, 0.5), Metrics(false, 0.0)});
  EXPECT_DOUBLE_EQ(rep.asr, 50.0);
  EXPECT_DOUBLE_EQ(rep.mean_wmr, 10.0);
  EXPECT_DOUBLE_EQ(rep.mean_per, 10.0);
  EXPECT_EQ(rep.sample_count, 3u);
  EXPECT_EQ(rep.skipped_count, 1u);
  EXPECT_EQ(rep.admitted_count, 2u);
  EXPECT_EQ(rep.success_count, 1u);
}

TEST(AggregateTest, SingleSuccessAndNoSuccess) {
  EXPECT_EQ(aggregate({Result(AttackStatus::success)}, {Metrics(true, 0.1, 1, 0, 1)}).asr, 100.0);
  const auto rep = aggregate({Result(AttackStatus::failed)}, {Metrics(false, 0)});
  EXPECT_EQ(rep.asr, 0.0);
  EXPECT_TRUE(std::isnan(rep.mean_wmr));
  EXPECT_TRUE(std::isnan(rep.mean_ses));
}

TEST(AggregateTest, UnsetMetricsAreCountedAsExcluded) {
  auto m = Metrics(true, 0.1, 10, 1, 0.8);
  m.perplexity.reset();
  m.ses.reset();
  const auto rep = aggregate({Result(AttackStatus::success), Result(AttackStatus::success)},
                             {m, Metrics(true, 0.3, 20, 3, 0.9)});
  EXPECT_EQ(rep.per_excluded, 1u);
  EXPECT_EQ(rep.ses_excluded, 1u);
  EXPECT_EQ(rep.sye_excluded, 0u);
  EXPECT_DOUBLE_EQ(rep.mean_per, 20.0);
  EXPECT_DOUBLE_EQ(rep.mean_sye, 2.0);
}

TEST(AggregateTest, Errors) {
  EXPECT_THROW(aggregate({Result(AttackStatus::skipped)}, {Metrics(false, 0)}), NoAdmittedSamples);
  EXPECT_THROW(aggregate({Result(AttackStatus::success)}, {}), std::invalid_argument);
}

TEST(AggregateProperty, PermutationInvariant) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<AttackResult> rs;
  std::vector<SampleMetrics> ms;
  for (int i = 0; i < 40; ++i) {
    const bool ok = u(rng) < 0.6;
    rs.push_back(Result(ok ? AttackStatus::success : (u(rng) < 0.5 ? AttackStatus::failed : AttackStatus::skipped)));
    ms.push_back(Metrics(ok, u(rng), 1 + 100 * u(rng), static_cast<std::size_t>(5 * u(rng)), u(rng)));
  }
  const auto base = aggregate(rs, ms);
  std::vector<std::size_t> order(rs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int t = 0; t < 50; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<AttackResult> r2;
    std::vector<SampleMetrics> m2;
    for (auto i : order) {
      r2.push_back(rs[i]);
      m2.push_back(ms[i]);
    }
    const auto rep = aggregate(r2, m2);
    EXPECT_EQ(rep.asr, base.asr);
    EXPECT_EQ(rep.mean_wmr, base.mean_wmr);
    EXPECT_EQ(rep.mean_per, base.mean_per);
    EXPECT_EQ(rep.mean_sye, base.mean_sye);
    EXPECT_EQ(rep.mean_ses, base.mean_ses);
  }
}

}  // namespace
}  // namespace advtext
