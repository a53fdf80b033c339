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

#include "advtext/semfilter.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>

#include "advtext/toybackend.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace advtext {
namespace {

using testing::ConstantParaphraser;
using testing::CountingParaphraser;

// Maps whole texts to fixed vectors.
class TableEmbedder : public SentenceEmbedOracle {
 public:
  explicit TableEmbedder(std::map<std::string, std::vector<double>> t) : t_(std::move(t)) {}
  std::vector<double> embed(const std::string& text) const override { return t_.at(text); }

 private:
  std::map<std::string, std::vector<double>> t_;
};

// Unit vector at cosine c from (1,0).
std::vector<double> AtCosine(double c) { return {c, std::sqrt(1.0 - c * c)}; }

OracleSuite GateSuite(double sim, std::shared_ptr<const ParaphraseOracle> para) {
  OracleSuite s;
  s.embedder = std::make_shared<TableEmbedder>(
      std::map<std::string, std::vector<double>>{{"orig", {1.0, 0.0}}, {"cand", AtCosine(sim)}});
  s.paraphraser = std::move(para);
  return s;
}

TEST(CosineSimilarityTest, Examples) {
  EXPECT_EQ(cosine_similarity({1, 2, 3}, {1, 2, 3}), 1.0);
  EXPECT_EQ(cosine_similarity({1, 0}, {0, 1}), 0.0);
  EXPECT_EQ(cosine_similarity({1, 0}, {-2, 0}), -1.0);
  EXPECT_THROW(cosine_similarity({0, 0}, {1, 0}), ZeroVector);
  EXPECT_THROW(cosine_similarity({1}, {1, 0}), OracleContractError);
}

TEST(CosineSimilarityTest, IdenticalVectorsGiveExactlyOne) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(1 + t % 7);
    for (auto& x : v) x = u(rng);
    EXPECT_EQ(cosine_similarity(v, v), 1.0);
  }
}

TEST(EmbeddingSimilarityTest, ToyCountVectors) {
  toy::ToyEmbedder e({"good", "film", "movie"});
  EXPECT_DOUBLE_EQ(embedding_similarity("good film", "good movie", e), 0.5);
  EXPECT_EQ(embedding_similarity("good film", "good film", e), 1.0);
  EXPECT_EQ(embedding_similarity("film", "movie", e), 0.0);
  EXPECT_THROW(embedding_similarity("", "film", e), std::invalid_argument);
}

TEST(ParaphraseProbabilityTest, ToyF1) {
  toy::ToyParaphraser p;
  EXPECT_DOUBLE_EQ(paraphrase_probability("a fine film", "a great film", p), 2.0 / 3.0);
  EXPECT_EQ(paraphrase_probability("a fine film", "a fine film", p), 1.0);
  EXPECT_EQ(paraphrase_probability("one", "two", p), 0.0);
}

TEST(ParaphraseProbabilityTest, ClampsAndRejectsNaN) {
  EXPECT_EQ(paraphrase_probability("a", "b", ConstantParaphraser(1.5)), 1.0);
  EXPECT_EQ(paraphrase_probability("a", "b", ConstantParaphraser(-0.5)), 0.0);
  EXPECT_THROW(paraphrase_probability("a", "b", ConstantParaphraser(std::nan(""))), OracleContractError);
}

TEST(GateTest, BothStagesPass) {
  const auto v = gate("orig", "cand", GateSuite(0.85, std::make_shared<ConstantParaphraser>(0.75)), {});
  EXPECT_NEAR(v.sim_score, 0.85, 1e-12);
  EXPECT_EQ(v.para_score, 0.75);
  EXPECT_TRUE(v.passed_sim);
  EXPECT_TRUE(v.passed_para);
  EXPECT_TRUE(v.passed);
}

TEST(GateTest, SimilarityFailureShortCircuits) {
  auto counter = std::make_shared<CountingParaphraser>(std::make_shared<ConstantParaphraser>(1.0));
  const auto v = gate("orig", "cand", GateSuite(0.70, counter), {});
  EXPECT_FALSE(v.passed_sim);
  EXPECT_FALSE(v.passed);
  EXPECT_TRUE(is_unevaluated(v.para_score));
  EXPECT_EQ(counter->calls.load(), 0);
}

TEST(GateTest, ParaphraseFailure) {
  const auto v = gate("orig", "cand", GateSuite(0.85, std::make_shared<ConstantParaphraser>(0.60)), {});
  EXPECT_TRUE(v.passed_sim);
  EXPECT_FALSE(v.passed_para);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.para_score, 0.60);
}

TEST(GateProperty, ShortCircuitNeverCallsParaphraser) {
  auto counter = std::make_shared<CountingParaphraser>(std::make_shared<ConstantParaphraser>(0.9));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 300; ++t) {
    const double sim = u(rng);
    GateConfig cfg{u(rng), u(rng)};
    const int before = counter->calls.load();
    const auto v = gate("orig", "cand", GateSuite(sim, counter), cfg);
    EXPECT_EQ(counter->calls.load() - before, v.passed_sim ? 1 : 0);
    EXPECT_EQ(v.passed, v.passed_sim && v.passed_para);
  }
}

std::shared_ptr<OracleSuite> ToySuite() {
  static const std::set<std::string> vocab = {"the", "soup", "was", "good", "bad", "warm", "cold", "."};
  auto s = std::make_shared<OracleSuite>();
  s->embedder = std::make_shared<toy::ToyEmbedder>(vocab);
  s->paraphraser = std::make_shared<toy::ToyParaphraser>();
  return s;
}

const std::vector<std::string>& Texts() {
  static const std::vector<std::string> t = {
      "The soup was good .", "The soup was bad .", "good good soup", "warm soup was the cold",
      "nothing in vocabulary", "The soup was warm and good .", "bad"};
  return t;
}

TEST(GateProperty, SymmetricScores) {
  const auto s = ToySuite();
  for (const auto& a : Texts())
    for (const auto& b : Texts()) {
      const GateConfig open{0.0, 0.0};
      const auto ab = gate(a, b, *s, open), ba = gate(b, a, *s, open);
      EXPECT_DOUBLE_EQ(ab.sim_score, ba.sim_score) << a << " | " << b;
      EXPECT_DOUBLE_EQ(ab.para_score, ba.para_score) << a << " | " << b;
    }
}

TEST(GateProperty, Reflexive) {
  const auto s = ToySuite();
  for (const auto& a : Texts()) EXPECT_TRUE(gate(a, a, *s, GateConfig{1.0, 1.0}).passed) << a;
}

TEST(GateProperty, RaisingThresholdsNeverAdmitsMore) {
  const auto s = ToySuite();
  const std::vector<double> levels = {0.0, 0.3, 0.5, 0.7, 0.8, 0.9, 1.0};
  for (const auto& a : Texts())
    for (const auto& b : Texts())
      for (std::size_t i = 1; i < levels.size(); ++i) {
        const bool lo = gate(a, b, *s, GateConfig{levels[i - 1], levels[i - 1]}).passed;
        const bool hi = gate(a, b, *s, GateConfig{levels[i], levels[i]}).passed;
        EXPECT_TRUE(lo || !hi);
      }
}

}  // namespace
}  // namespace advtext
