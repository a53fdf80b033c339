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

#include "advtext/perturb.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "advtext/toy_fixture.hpp"
#include "advtext/toybackend.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace advtext {
namespace {

using testing::FromWords;
using testing::Single;
using Words = std::vector<std::string>;

OracleSuite BundledSuite() { return toy::make_suite(toy::parse_fixture(std::string(toy::kFixture))); }

std::vector<LabeledExample> Corpus() {
  const Words lines = {"The soup was good and warm.",        "Our waiter was friendly all night.",
                       "The bread was stale this morning.",  "My coffee was terrible as usual.",
                       "This small hotel room was lovely overall.", "The music there was boring tonight."};
  const std::vector<int> labels = {0, 0, 1, 1, 0, 1};
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < lines.size(); ++i) out.push_back(Single(lines[i], labels[i]));
  return out;
}

AttackConfig Mode(AttackMode m) {
  AttackConfig c;
  c.selection.mode = m;
  return c;
}

TEST(MaskAtTest, Examples) {
  const auto t = make_text({"a", "fine", "film"});
  const auto ctx = mask_at(t, 1);
  EXPECT_EQ(ctx.text.words, (Words{"a", "[MASK]", "film"}));
  EXPECT_EQ(ctx.mask_index, 1u);
  EXPECT_EQ(ctx.original_word, "fine");
  EXPECT_EQ(t.words, (Words{"a", "fine", "film"}));
  EXPECT_EQ(mask_at(make_text({"w"}), 0).text.words, (Words{"[MASK]"}));
  EXPECT_THROW(mask_at(t, 3), IndexOutOfRange);
}

TEST(SubstituteTest, Examples) {
  const auto t = make_text({"a", "fine", "film"});
  EXPECT_EQ(substitute(t, 1, "great").words, (Words{"a", "great", "film"}));
  EXPECT_EQ(substitute(t, 1, "great").raw, "a great film");
  EXPECT_EQ(substitute(t, 1, "fine"), t);
  EXPECT_EQ(substitute(make_text({"w"}), 0, "z").words, (Words{"z"}));
  EXPECT_THROW(substitute(t, 3, "x"), IndexOutOfRange);
  EXPECT_THROW(substitute(t, 0, ""), std::invalid_argument);
}

TEST(MatchCaseTest, Rules) {
  EXPECT_EQ(match_case("bad", "Good", true), "Bad");
  EXPECT_EQ(match_case("bad", "Good", false), "bad");
  EXPECT_EQ(match_case("bad", "GOOD", false), "BAD");
  EXPECT_EQ(match_case("Bad", "good", true), "bad");
  EXPECT_EQ(match_case("one", "A", true), "One");
}

OracleSuite TableSuite(toy::ToyMlmTable table) {
  toy::ToyVictimSpec spec;
  spec.embeddings = {{"good", {2, 1}}, {"great", {2.5, 1}}, {"fine", {1.5, 1}}};
  OracleSuite s;
  s.victim = std::make_shared<toy::ToyVictim>(spec);
  s.mlm = std::make_shared<toy::ToyMaskFill>(std::move(table));
  return s;
}

TEST(GenerateCandidatesTest, ReadsTheTable) {
  const auto s = TableSuite({{"good", {{"great", 0.6}, {"fine", 0.3}}}});
  const auto ex = FromWords({"a", "good", "film"}, 0);
  RankConfig rc;
  rc.k_candidates = 5;
  QueryMeter meter(100);
  auto c = generate_candidates(mask_at(ex.text_a, 1), ex, s, rc, meter);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].word, "great");
  EXPECT_EQ(c[0].fill_probability, 0.6);
  EXPECT_EQ(c[1].word, "fine");
  EXPECT_EQ(c[1].fill_probability, 0.3);
  EXPECT_EQ(meter.used(), 2u);
  EXPECT_NEAR(c[0].prediction_after.probability_of(0), toy::sigmoid(2.5), 1e-15);

  rc.k_candidates = 1;
  c = generate_candidates(mask_at(ex.text_a, 1), ex, s, rc, meter);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].word, "great");

  EXPECT_TRUE(generate_candidates(mask_at(ex.text_a, 2), ex, s, rc, meter).empty());
}

TEST(GenerateCandidatesTest, FiltersInvalidProposals) {
  const auto s = TableSuite(
      {{"good", {{"Good", 0.9}, {"[MASK]", 0.8}, {"##ly", 0.7}, {"two words", 0.6}, {",", 0.5}, {"fine", 0.4}}}});
  const auto ex = FromWords({"a", "good", "film"}, 0);
  QueryMeter meter(100);
  const auto c = generate_candidates(mask_at(ex.text_a, 1), ex, s, RankConfig{}, meter);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].word, "fine");
}

TEST(GenerateCandidatesTest, StopsWhenMeterIsEmpty) {
  const auto s = TableSuite({{"good", {{"great", 0.6}, {"fine", 0.3}}}});
  const auto ex = FromWords({"a", "good", "film"}, 0);
  QueryMeter meter(1);
  EXPECT_EQ(generate_candidates(mask_at(ex.text_a, 1), ex, s, RankConfig{}, meter).size(), 1u);
  EXPECT_EQ(meter.remaining(), 0u);
}

Candidate Cand(const std::string& w, double fill, double p_gold_after) {
  Candidate c;
  c.word = w;
  c.fill_probability = fill;
  c.prediction_after = PredictionProfile({p_gold_after, 1.0 - p_gold_after});
  return c;
}

TEST(RankCandidatesTest, StableOutputObjective) {
  RankConfig rc;
  rc.objective = Objective::stable_output;
  const PredictionProfile orig({0.5, 0.5});
  const auto r = rank_candidates({Cand("B", 0.3, 0.5), Cand("A", 0.6, 0.4)}, orig, 0, rc);
  EXPECT_EQ(r[0].word, "A");
  EXPECT_NEAR(r[0].rank_score, 0.5, 1e-15);
  EXPECT_EQ(r[1].word, "B");
  EXPECT_NEAR(r[1].rank_score, 0.3, 1e-15);
}

TEST(RankCandidatesTest, GoldDropObjective) {
  RankConfig rc;
  const PredictionProfile orig({0.9, 0.1});
  const auto r = rank_candidates({Cand("A", 0.6, 0.8), Cand("B", 0.3, 0.4)}, orig, 0, rc);
  EXPECT_EQ(r[0].word, "B");
  EXPECT_NEAR(r[0].rank_score, 0.8, 1e-15);
  EXPECT_EQ(r[1].word, "A");
  EXPECT_NEAR(r[1].rank_score, 0.7, 1e-15);
}

TEST(RankCandidatesTest, ZeroBetaOrdersByFillProbability) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (auto obj : {Objective::stable_output, Objective::gold_drop}) {
    RankConfig rc;
    rc.beta_rank = 0;
    rc.objective = obj;
    std::vector<Candidate> cands;
    for (int i = 0; i < 8; ++i) cands.push_back(Cand("w" + std::to_string(i), u(rng), u(rng)));
    const auto r = rank_candidates(cands, PredictionProfile({0.6, 0.4}), 0, rc);
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GE(r[i - 1].fill_probability, r[i].fill_probability);
  }
}

TEST(RankCandidatesTest, TiesBreakByFillThenWord) {
  RankConfig rc;
  rc.alpha_rank = 0;
  const PredictionProfile orig({0.5, 0.5});
  const auto r = rank_candidates({Cand("b", 0.2, 0.5), Cand("a", 0.2, 0.5), Cand("c", 0.3, 0.5)}, orig, 0, rc);
  EXPECT_EQ(r[0].word, "c");
  EXPECT_EQ(r[1].word, "a");
  EXPECT_EQ(r[2].word, "b");
}

TEST(RunAttackTest, OppositePolaritySubstituteFlipsInOneEdit) {
  const auto s = BundledSuite();
  for (auto mode : {AttackMode::sassp, AttackMode::clare}) {
    const auto r = run_attack(Single("The soup was good and warm.", 0), s, Mode(mode));
    EXPECT_EQ(r.status, AttackStatus::success);
    ASSERT_EQ(r.edits.size(), 1u);
    EXPECT_EQ(r.edits[0], (Edit{3, "good", "bad"}));
    EXPECT_EQ(r.adversarial_text.raw, "The soup was bad and warm.");
    EXPECT_EQ(r.final_label, 1);
    EXPECT_NEAR(r.sim_score, 6.0 / 7.0, 1e-12);
    EXPECT_NEAR(r.para_score, 6.0 / 7.0, 1e-12);
    EXPECT_TRUE(r.gates_passed);
    // initial predict, gradient, attention (sassp only), three candidates
    EXPECT_EQ(r.queries_used, mode == AttackMode::sassp ? 6u : 5u);
  }
}

TEST(RunAttackTest, ZeroEditBudgetFails) {
  auto c = Mode(AttackMode::sassp);
  c.budget.max_edits = 0;
  const auto r = run_attack(Single("The soup was good and warm.", 0), BundledSuite(), c);
  EXPECT_EQ(r.status, AttackStatus::failed);
  EXPECT_TRUE(r.edits.empty());
  EXPECT_EQ(r.reason, "edit_budget");
}

TEST(RunAttackTest, UnsatisfiableGateFails) {
  auto c = Mode(AttackMode::sassp);
  c.gate = {1.01, 1.01};
  const auto r = run_attack(Single("The soup was good and warm.", 0), BundledSuite(), c);
  EXPECT_EQ(r.status, AttackStatus::failed);
  EXPECT_TRUE(r.edits.empty());
  EXPECT_EQ(r.adversarial_text, r.original.text_a);
}

TEST(RunAttackTest, ZeroQueryBudgetFails) {
  auto c = Mode(AttackMode::clare);
  c.budget.max_queries = 0;
  const auto r = run_attack(Single("The soup was good and warm.", 0), BundledSuite(), c);
  EXPECT_EQ(r.status, AttackStatus::failed);
  EXPECT_EQ(r.reason, "query_budget");
  EXPECT_EQ(r.queries_used, 0u);
}

TEST(RunAttackTest, AdmissionFailures) {
  const auto s = BundledSuite();
  auto r = run_attack(Single("The soup was good.", 1), s, Mode(AttackMode::sassp));
  EXPECT_EQ(r.status, AttackStatus::skipped);
  EXPECT_EQ(r.reason, "initially_misclassified");
  r = run_attack(Single("", 0), s, Mode(AttackMode::sassp));
  EXPECT_EQ(r.reason, "empty_text");
  r = run_attack(Single("good", 2), s, Mode(AttackMode::sassp));
  EXPECT_EQ(r.reason, "label_out_of_range");
  r = run_attack(Single("the , .", 0), s, Mode(AttackMode::sassp));
  EXPECT_EQ(r.status, AttackStatus::unattackable);
  EXPECT_EQ(r.reason, "no_eligible_word");
  EXPECT_TRUE(r.admitted());
}

class ThrowingFill : public MaskFillOracle {
 public:
  std::vector<FillCandidate> fill(const MaskedContext&, std::size_t) const override {
    throw std::runtime_error("backend down");
  }
};

TEST(RunAttackTest, OracleFailureSkipsSample) {
  auto s = BundledSuite();
  s.mlm = std::make_shared<ThrowingFill>();
  const auto r = run_attack(Single("The soup was good and warm.", 0), s, Mode(AttackMode::sassp));
  EXPECT_EQ(r.status, AttackStatus::skipped);
  EXPECT_EQ(r.reason, "oracle_error: backend down");
}

TEST(RunAttackProperty, InvariantsOnToyCorpus) {
  const auto s = BundledSuite();
  for (auto mode : {AttackMode::sassp, AttackMode::clare})
    for (auto obj : {Objective::gold_drop, Objective::stable_output})
      for (std::size_t q : {3u, 8u, 2000u})
        for (const auto& ex : Corpus()) {
          auto c = Mode(mode);
          c.ranking.objective = obj;
          c.budget.max_queries = q;
          const auto r = run_attack(ex, s, c);
          const auto again = run_attack(ex, s, c);
          EXPECT_EQ(r.edits, again.edits);
          EXPECT_EQ(r.queries_used, again.queries_used);
          EXPECT_LE(r.queries_used, q);

          // Only edited positions differ.
          std::set<std::size_t> edited;
          for (const auto& e : r.edits) {
            EXPECT_TRUE(edited.insert(e.index).second);
            EXPECT_FALSE(iequals(e.original_word, e.new_word));
          }
          ASSERT_EQ(r.adversarial_text.size(), ex.text_a.size());
          for (std::size_t i = 0; i < ex.text_a.size(); ++i)
            EXPECT_EQ(r.adversarial_text.words[i] != ex.text_a.words[i], edited.count(i) == 1);
          EXPECT_LE(r.edits.size(), c.budget.edit_limit(ex.text_a.size()));
          if (mode == AttackMode::clare) {
            EXPECT_LE(r.edits.size(), c.selection.top_k);
          }

          if (r.success) {
            const auto after = s.victim->predict(ex.with_attackable(r.adversarial_text));
            EXPECT_NE(after.predicted_label(), ex.gold_label);
            if (mode == AttackMode::sassp) {
              EXPECT_TRUE(r.gates_passed);
            }
          }
        }
}

TEST(RunAttackTest, ReselectNeverRevisitsAPosition) {
  auto c = Mode(AttackMode::sassp);
  c.ranking.objective = Objective::stable_output;
  c.ranking.reselect_each_step = true;
  c.budget.max_edits = 10;
  c.gate = {0.0, 0.0};
  const auto r = run_attack(Single("The good great superb food.", 0), BundledSuite(), c);
  std::set<std::size_t> idx;
  for (const auto& e : r.edits) EXPECT_TRUE(idx.insert(e.index).second);
  EXPECT_GE(r.edits.size(), 2u);
}

TEST(RunBatchTest, EmptyDataset) { EXPECT_TRUE(run_batch({}, BundledSuite(), AttackConfig{}).empty()); }

TEST(RunBatchTest, OrderStableAndSkipsMisclassified) {
  auto data = Corpus();
  data.insert(data.begin() + 2, Single("The soup was good.", 1));
  const auto r = run_batch(data, BundledSuite(), AttackConfig{}, 42);
  ASSERT_EQ(r.size(), data.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].original.text_a, data[i].text_a);
    EXPECT_EQ(r[i].sample_seed, derive_sample_seed(42, i));
  }
  EXPECT_EQ(r[2].status, AttackStatus::skipped);
  EXPECT_EQ(r[2].reason, "initially_misclassified");
}

class UnsafeVictim : public VictimOracle {
 public:
  explicit UnsafeVictim(std::shared_ptr<const VictimOracle> inner) : inner_(std::move(inner)) {}
  bool concurrent_safe() const override { return false; }
  template <typename F>
  auto guard(F f) const {
    if (busy_.exchange(true)) ++overlaps;
    auto out = f();
    busy_ = false;
    return out;
  }
  std::size_t num_classes() const override { return inner_->num_classes(); }
  PredictionProfile predict(const LabeledExample& e) const override { return guard([&] { return inner_->predict(e); }); }
  std::vector<double> loss_gradient_norms(const LabeledExample& e, int g) const override {
    return guard([&] { return inner_->loss_gradient_norms(e, g); });
  }
  std::vector<double> attention_received(const LabeledExample& e) const override {
    return guard([&] { return inner_->attention_received(e); });
  }
  mutable std::atomic<int> overlaps{0};

 private:
  std::shared_ptr<const VictimOracle> inner_;
  mutable std::atomic<bool> busy_{false};
};

TEST(RunBatchTest, ParallelMatchesSequential) {
  auto s = BundledSuite();
  auto unsafe = std::make_shared<UnsafeVictim>(s.victim);
  s.victim = unsafe;
  std::vector<LabeledExample> data;
  for (int rep = 0; rep < 5; ++rep)
    for (const auto& e : Corpus()) data.push_back(e);
  const auto seq = run_batch(data, s, AttackConfig{}, 7, 1);
  const auto par = run_batch(data, s, AttackConfig{}, 7, 4);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].edits, par[i].edits);
    EXPECT_EQ(seq[i].status, par[i].status);
    EXPECT_EQ(seq[i].queries_used, par[i].queries_used);
    EXPECT_EQ(seq[i].sample_seed, par[i].sample_seed);
  }
  EXPECT_EQ(unsafe->overlaps.load(), 0);
}

TEST(BudgetConfigTest, EditLimit) {
  BudgetConfig b;
  EXPECT_EQ(b.edit_limit(7), 3u);
  EXPECT_EQ(b.edit_limit(10), 4u);
  EXPECT_EQ(b.edit_limit(1), 1u);
  b.max_edits = 2;
  EXPECT_EQ(b.edit_limit(100), 2u);
}

}  // namespace
}  // namespace advtext
