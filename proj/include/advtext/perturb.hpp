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

// Contextual word substitution: masking, MLM candidate generation, candidate
// ranking, and the greedy attack loop shared by both attack modes.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "advtext/core.hpp"
#include "advtext/scoring.hpp"
#include "advtext/semfilter.hpp"

namespace advtext {

// How the prediction-change term of a candidate's rank score is used.
enum class Objective {
  // Penalize any change of the gold-label probability (the baseline formula
  // taken literally: prefers candidates that move the model least).
  stable_output,
  // Reward a drop of the gold-label probability.
  gold_drop,
};

inline std::string to_string(Objective o) {
  return o == Objective::gold_drop ? "gold_drop" : "stable_output";
}

struct RankConfig {
  double alpha_rank = 1.0;
  double beta_rank = 1.0;
  std::size_t k_candidates = 50;
  Objective objective = Objective::gold_drop;
  // Re-score and re-select targets on the working text after every edit.
  bool reselect_each_step = false;

  void validate() const {
    if (alpha_rank < 0.0 || beta_rank < 0.0) throw std::invalid_argument("rank weights must be >= 0");
    if (!(alpha_rank + beta_rank > 0.0)) throw std::invalid_argument("alpha_rank + beta_rank must be > 0");
    if (k_candidates == 0) throw std::invalid_argument("k_candidates must be positive");
  }
};

struct BudgetConfig {
  double max_edits_fraction = 0.4;
  // Absolute edit cap; overrides the fraction when set.
  std::optional<std::size_t> max_edits;
  std::size_t max_queries = 2000;

  std::size_t edit_limit(std::size_t word_count) const {
    if (max_edits) return *max_edits;
    return static_cast<std::size_t>(std::ceil(max_edits_fraction * static_cast<double>(word_count)));
  }
};

struct AttackConfig {
  SelectionConfig selection;
  RankConfig ranking;
  GateConfig gate;
  BudgetConfig budget;
};

struct Candidate {
  std::string word;
  double fill_probability = 0.0;
  double rank_score = 0.0;
  PredictionProfile prediction_after;
};

struct Edit {
  std::size_t index = 0;
  std::string original_word;
  std::string new_word;

  friend bool operator==(const Edit&, const Edit&) = default;
};

enum class AttackStatus { success, failed, unattackable, skipped };

inline std::string to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::success: return "success";
    case AttackStatus::failed: return "failed";
    case AttackStatus::unattackable: return "unattackable";
    case AttackStatus::skipped: return "skipped";
  }
  return "unknown";
}

struct AttackResult {
  LabeledExample original;
  TokenizedText adversarial_text;
  bool success = false;
  std::vector<Edit> edits;
  std::size_t queries_used = 0;
  double sim_score = kUnevaluated;
  double para_score = kUnevaluated;
  bool gates_passed = false;
  AttackStatus status = AttackStatus::failed;
  std::string reason;
  int final_label = -1;
  std::uint64_t sample_seed = 0;

  // Admitted samples form the success-rate denominator.
  bool admitted() const { return status != AttackStatus::skipped; }
};

// Counts victim calls against a hard ceiling.
class QueryMeter {
 public:
  explicit QueryMeter(std::size_t limit) : limit_(limit) {}

  bool try_consume(std::size_t n = 1) {
    if (used_ + n > limit_) return false;
    used_ += n;
    return true;
  }
  std::size_t used() const { return used_; }
  std::size_t remaining() const { return limit_ - used_; }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
};

inline MaskedContext mask_at(const TokenizedText& text, std::size_t index,
                             const std::string& mask_symbol = "[MASK]") {
  if (index >= text.size()) throw IndexOutOfRange("mask index outside text");
  MaskedContext ctx;
  ctx.text = text;
  ctx.original_word = text.words[index];
  ctx.text.words[index] = mask_symbol;
  ctx.text.raw = detokenize(ctx.text.words);
  ctx.mask_index = index;
  return ctx;
}

inline TokenizedText substitute(const TokenizedText& text, std::size_t index, const std::string& word) {
  if (index >= text.size()) throw IndexOutOfRange("substitution index outside text");
  if (word.empty()) throw std::invalid_argument("substitute word is empty");
  TokenizedText out = text;
  out.words[index] = word;
  out.raw = detokenize(out.words);
  return out;
}

inline bool is_sentence_initial(const TokenizedText& text, std::size_t index) {
  if (index == 0) return true;
  const auto& prev = text.words[index - 1];
  return prev == "." || prev == "!" || prev == "?";
}

// Candidates are lowercased, except that an all-caps original makes the
// candidate all-caps and a capitalized sentence-initial original capitalizes it.
inline std::string match_case(const std::string& candidate, const std::string& original,
                              bool sentence_initial) {
  const bool has_alpha = std::any_of(original.begin(), original.end(),
                                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
  const bool all_caps = has_alpha && original.size() > 1 && to_upper(original) == original;
  if (all_caps) return to_upper(candidate);
  std::string out = to_lower(candidate);
  if (sentence_initial && !original.empty() && std::isupper(static_cast<unsigned char>(original[0])) &&
      !out.empty())
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

inline bool is_subword_fragment(const std::string& w) {
  return w.rfind("##", 0) == 0 ||
         std::any_of(w.begin(), w.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

// Mask-fill proposals for one position, filtered and cased, each evaluated by
// one victim call. Stops early when the meter runs dry.
inline std::vector<Candidate> generate_candidates(const MaskedContext& context,
                                                  const LabeledExample& working,
                                                  const OracleSuite& oracles, const RankConfig& config,
                                                  QueryMeter& meter) {
  const std::string mask = oracles.mlm->mask_symbol();
  const bool initial = is_sentence_initial(context.text, context.mask_index);
  std::vector<Candidate> out;
  std::set<std::string> seen;
  for (const auto& fc : oracles.mlm->fill(context, config.k_candidates)) {
    if (!(fc.probability > 0.0 && fc.probability <= 1.0))
      throw OracleContractError("fill probability outside (0,1]");
    if (fc.word.empty() || fc.word == mask || is_subword_fragment(fc.word) || is_punctuation(fc.word))
      continue;
    std::string word = match_case(fc.word, context.original_word, initial);
    if (iequals(word, context.original_word) || !seen.insert(word).second) continue;
    Candidate c;
    c.word = std::move(word);
    c.fill_probability = fc.probability;
    out.push_back(std::move(c));
    if (out.size() == config.k_candidates) break;
  }
  const TokenizedText& base = working.attackable();
  std::size_t evaluated = 0;
  for (auto& c : out) {
    if (!meter.try_consume()) break;
    auto perturbed = working.with_attackable(substitute(base, context.mask_index, c.word));
    c.prediction_after = checked_predict(*oracles.victim, perturbed);
    ++evaluated;
  }
  out.resize(evaluated);
  return out;
}

inline std::vector<Candidate> rank_candidates(std::vector<Candidate> candidates,
                                              const PredictionProfile& original_profile, int gold_label,
                                              const RankConfig& config) {
  const double p_gold = original_profile.probability_of(gold_label);
  for (auto& c : candidates) {
    const double p_after = c.prediction_after.probability_of(gold_label);
    const double fill = config.alpha_rank * c.fill_probability;
    c.rank_score = config.objective == Objective::stable_output
                       ? fill - config.beta_rank * std::abs(p_after - p_gold)
                       : fill + config.beta_rank * (p_gold - p_after);
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
    if (a.fill_probability != b.fill_probability) return a.fill_probability > b.fill_probability;
    return a.word < b.word;
  });
  return candidates;
}

namespace detail {

inline AttackResult finish(AttackResult r, const LabeledExample& working, const QueryMeter& meter) {
  r.adversarial_text = working.attackable();
  r.queries_used = meter.used();
  return r;
}

}  // namespace detail

// Greedy attack over the selected targets in descending score order. Edits
// accumulate on the working text; the loop stops on the first label flip or
// when targets, the edit budget or the query budget run out.
inline AttackResult run_attack(const LabeledExample& example, const OracleSuite& oracles,
                               const AttackConfig& config) {
  AttackResult r;
  r.original = example;
  r.adversarial_text = example.attackable();
  LabeledExample working = example;
  QueryMeter meter(config.budget.max_queries);

  const TokenizedText& source = example.attackable();
  if (source.empty()) {
    r.status = AttackStatus::skipped;
    r.reason = "empty_text";
    return r;
  }
  if (example.gold_label < 0 ||
      static_cast<std::size_t>(example.gold_label) >= oracles.victim->num_classes()) {
    r.status = AttackStatus::skipped;
    r.reason = "label_out_of_range";
    return r;
  }

  const bool gated = config.selection.mode == AttackMode::sassp;
  const int gold = example.gold_label;
  std::optional<GateVerdict> accepted;

  try {
    if (!meter.try_consume()) {
      r.reason = "query_budget";
      return detail::finish(std::move(r), working, meter);
    }
    PredictionProfile current = checked_predict(*oracles.victim, example);
    if (current.predicted_label() != gold) {
      r.status = AttackStatus::skipped;
      r.reason = "initially_misclassified";
      r.final_label = current.predicted_label();
      return detail::finish(std::move(r), working, meter);
    }
    r.final_label = current.predicted_label();

    const std::string original_str = detokenize(source);
    const std::string mask = oracles.mlm->mask_symbol();
    const std::size_t edit_limit = config.budget.edit_limit(source.size());
    std::vector<bool> touched(source.size(), false);
    bool first_pass = true;
    bool done = false;

    while (!done) {
      done = true;
      if (r.edits.size() >= edit_limit) {
        r.reason = "edit_budget";
        break;
      }
      auto eligible = eligibility_mask(working.attackable(), mask);
      for (std::size_t i = 0; i < eligible.size(); ++i)
        if (touched[i]) eligible[i] = false;
      if (std::none_of(eligible.begin(), eligible.end(), [](bool b) { return b; })) {
        if (first_pass) throw EmptyEligibleSet();
        r.reason = "targets_exhausted";
        break;
      }
      if (!meter.try_consume(gated ? 2 : 1)) {
        r.reason = "query_budget";
        break;
      }
      const TokenScores scores = score_words(working, *oracles.victim, config.selection, eligible);
      const auto targets = select_targets(scores, config.selection);
      first_pass = false;
      r.reason = "targets_exhausted";

      for (std::size_t t : targets) {
        if (r.edits.size() >= edit_limit) {
          r.reason = "edit_budget";
          break;
        }
        if (meter.remaining() == 0) {
          r.reason = "query_budget";
          break;
        }
        touched[t] = true;
        const auto ctx = mask_at(working.attackable(), t, mask);
        auto candidates = generate_candidates(ctx, working, oracles, config.ranking, meter);
        if (candidates.empty()) continue;
        const auto ranked = rank_candidates(std::move(candidates), current, gold, config.ranking);

        const Candidate* chosen = nullptr;
        for (const auto& c : ranked) {
          if (!gated) {
            chosen = &c;
            break;
          }
          const auto text = detokenize(substitute(working.attackable(), t, c.word));
          const GateVerdict v = gate(original_str, text, oracles, config.gate);
          if (v.passed) {
            chosen = &c;
            accepted = v;
            break;
          }
        }
        if (chosen == nullptr) continue;

        r.edits.push_back({t, working.attackable().words[t], chosen->word});
        working = working.with_attackable(substitute(working.attackable(), t, chosen->word));
        current = chosen->prediction_after;
        r.final_label = current.predicted_label();
        if (current.predicted_label() != gold) {
          r.success = true;
          r.status = AttackStatus::success;
          r.reason.clear();
          break;
        }
        if (config.ranking.reselect_each_step) {
          done = false;
          break;
        }
      }
    }

    // Similarity of the final text, for reporting. In gated mode this is the
    // verdict of the last accepted edit, which was computed on the same text.
    if (gated && accepted) {
      r.sim_score = accepted->sim_score;
      r.para_score = accepted->para_score;
      r.gates_passed = accepted->passed;
    } else {
      const auto v = gate(original_str, detokenize(working.attackable()), oracles, config.gate);
      r.sim_score = v.sim_score;
      r.para_score = v.para_score;
      r.gates_passed = v.passed;
    }
  } catch (const EmptyEligibleSet&) {
    r.status = AttackStatus::unattackable;
    r.reason = "no_eligible_word";
    r.success = false;
  } catch (const std::exception& e) {
    r.status = AttackStatus::skipped;
    r.reason = std::string("oracle_error: ") + e.what();
    r.success = false;
  }
  return detail::finish(std::move(r), working, meter);
}

// ---------------------------------------------------------------------------
// Batch execution
// ---------------------------------------------------------------------------

// SplitMix64 of (seed, index).
inline std::uint64_t derive_sample_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

class LockedVictim final : public VictimOracle {
 public:
  explicit LockedVictim(std::shared_ptr<const VictimOracle> inner) : inner_(std::move(inner)) {}
  std::size_t num_classes() const override { return inner_->num_classes(); }
  PredictionProfile predict(const LabeledExample& e) const override {
    std::lock_guard lock(mu_);
    return inner_->predict(e);
  }
  std::vector<double> loss_gradient_norms(const LabeledExample& e, int gold) const override {
    std::lock_guard lock(mu_);
    return inner_->loss_gradient_norms(e, gold);
  }
  std::vector<double> attention_received(const LabeledExample& e) const override {
    std::lock_guard lock(mu_);
    return inner_->attention_received(e);
  }

 private:
  std::shared_ptr<const VictimOracle> inner_;
  mutable std::mutex mu_;
};

class LockedMaskFill final : public MaskFillOracle {
 public:
  explicit LockedMaskFill(std::shared_ptr<const MaskFillOracle> inner) : inner_(std::move(inner)) {}
  std::string mask_symbol() const override { return inner_->mask_symbol(); }
  std::vector<FillCandidate> fill(const MaskedContext& c, std::size_t k) const override {
    std::lock_guard lock(mu_);
    return inner_->fill(c, k);
  }

 private:
  std::shared_ptr<const MaskFillOracle> inner_;
  mutable std::mutex mu_;
};

class LockedEmbed final : public SentenceEmbedOracle {
 public:
  explicit LockedEmbed(std::shared_ptr<const SentenceEmbedOracle> inner) : inner_(std::move(inner)) {}
  std::vector<double> embed(const std::string& t) const override {
    std::lock_guard lock(mu_);
    return inner_->embed(t);
  }

 private:
  std::shared_ptr<const SentenceEmbedOracle> inner_;
  mutable std::mutex mu_;
};

class LockedParaphrase final : public ParaphraseOracle {
 public:
  explicit LockedParaphrase(std::shared_ptr<const ParaphraseOracle> inner) : inner_(std::move(inner)) {}
  double score(const std::string& a, const std::string& b) const override {
    std::lock_guard lock(mu_);
    return inner_->score(a, b);
  }

 private:
  std::shared_ptr<const ParaphraseOracle> inner_;
  mutable std::mutex mu_;
};

class LockedLM final : public CausalLMOracle {
 public:
  explicit LockedLM(std::shared_ptr<const CausalLMOracle> inner) : inner_(std::move(inner)) {}
  LogLikelihood log_likelihood(const std::string& t) const override {
    std::lock_guard lock(mu_);
    return inner_->log_likelihood(t);
  }

 private:
  std::shared_ptr<const CausalLMOracle> inner_;
  mutable std::mutex mu_;
};

class LockedGrammar final : public GrammarOracle {
 public:
  explicit LockedGrammar(std::shared_ptr<const GrammarOracle> inner) : inner_(std::move(inner)) {}
  std::size_t error_count(const std::string& t) const override {
    std::lock_guard lock(mu_);
    return inner_->error_count(t);
  }

 private:
  std::shared_ptr<const GrammarOracle> inner_;
  mutable std::mutex mu_;
};

template <typename Locked, typename T>
std::shared_ptr<const T> lock_if_needed(std::shared_ptr<const T> oracle) {
  if (!oracle || oracle->concurrent_safe()) return oracle;
  return std::make_shared<Locked>(std::move(oracle));
}

}  // namespace detail

// Wraps every oracle that is not safe for concurrent calls behind a mutex.
inline OracleSuite serialize_unsafe(OracleSuite s) {
  s.victim = detail::lock_if_needed<detail::LockedVictim>(std::move(s.victim));
  s.mlm = detail::lock_if_needed<detail::LockedMaskFill>(std::move(s.mlm));
  s.embedder = detail::lock_if_needed<detail::LockedEmbed>(std::move(s.embedder));
  s.paraphraser = detail::lock_if_needed<detail::LockedParaphrase>(std::move(s.paraphraser));
  s.lm = detail::lock_if_needed<detail::LockedLM>(std::move(s.lm));
  s.grammar = detail::lock_if_needed<detail::LockedGrammar>(std::move(s.grammar));
  s.metric_embedder = detail::lock_if_needed<detail::LockedEmbed>(std::move(s.metric_embedder));
  return s;
}

// One result per example, in input order. Per-sample failures are recorded in
// the result and never abort the batch.
inline std::vector<AttackResult> run_batch(const std::vector<LabeledExample>& dataset,
                                           const OracleSuite& oracles, const AttackConfig& config,
                                           std::uint64_t seed = 0, std::size_t workers = 1) {
  std::vector<AttackResult> results(dataset.size());
  auto run_one = [&](const OracleSuite& suite, std::size_t i) {
    results[i] = run_attack(dataset[i], suite, config);
    results[i].sample_seed = derive_sample_seed(seed, i);
  };
  workers = std::max<std::size_t>(1, std::min(workers, dataset.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < dataset.size(); ++i) run_one(oracles, i);
    return results;
  }
  const OracleSuite shared = serialize_unsafe(oracles);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < dataset.size(); i = next++) run_one(shared, i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace advtext
