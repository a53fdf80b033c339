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

// Word importance: gradient saliency, attention received, their normalized
// combination, and target selection (relative threshold or saliency top-k).

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/core.hpp"

namespace advtext {

enum class AttackMode { sassp, clare };

inline std::string to_string(AttackMode m) { return m == AttackMode::sassp ? "sassp" : "clare"; }

struct SelectionConfig {
  double alpha = 0.5;  // saliency weight
  double beta = 0.5;   // attention weight
  double gamma = 0.7;  // threshold, relative to the best eligible score
  std::size_t top_k = 5;
  AttackMode mode = AttackMode::sassp;

  void validate() const {
    if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("alpha and beta must be >= 0");
    if (!(alpha + beta > 0.0)) throw std::invalid_argument("alpha + beta must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0,1]");
    if (top_k == 0) throw std::invalid_argument("top_k must be positive");
  }
};

struct TokenScores {
  std::vector<double> saliency;
  std::vector<double> attention;
  std::vector<double> saliency_norm;
  std::vector<double> attention_norm;
  std::vector<double> combined;
  std::vector<bool> eligible;

  std::size_t size() const { return eligible.size(); }
};

inline bool is_determiner(std::string_view word) {
  const std::string w = to_lower(word);
  return w == "a" || w == "an" || w == "the";
}

// Punctuation, determiners and the mask symbol are never perturbed.
inline std::vector<bool> eligibility_mask(const TokenizedText& text,
                                          std::string_view mask_symbol = "[MASK]") {
  std::vector<bool> out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto& w = text.words[i];
    out[i] = !w.empty() && !is_punctuation(w) && !is_determiner(w) && w != mask_symbol;
  }
  return out;
}

inline std::vector<double> compute_saliency(const LabeledExample& example, const VictimOracle& victim) {
  if (example.attackable().empty()) throw std::invalid_argument("attackable text is empty");
  return checked_gradient_norms(victim, example, example.gold_label);
}

inline std::vector<double> compute_attention(const LabeledExample& example, const VictimOracle& victim) {
  if (example.attackable().empty()) throw std::invalid_argument("attackable text is empty");
  return checked_attention(victim, example);
}

// Min-max rescaling over eligible entries; a constant eligible set maps to 1,
// ineligible entries map to 0.
inline std::vector<double> normalize_scores(const std::vector<double>& raw,
                                            const std::vector<bool>& eligible) {
  if (raw.size() != eligible.size()) throw std::invalid_argument("normalize_scores: length mismatch");
  std::vector<double> out(raw.size(), 0.0);
  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!eligible[i]) continue;
    if (!any) {
      lo = hi = raw[i];
      any = true;
    } else {
      lo = std::min(lo, raw[i]);
      hi = std::max(hi, raw[i]);
    }
  }
  if (!any) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!eligible[i]) continue;
    out[i] = hi == lo ? 1.0 : (raw[i] - lo) / (hi - lo);
  }
  return out;
}

inline std::vector<double> combine_scores(const std::vector<double>& saliency_norm,
                                          const std::vector<double>& attention_norm,
                                          const SelectionConfig& config) {
  if (saliency_norm.size() != attention_norm.size())
    throw std::invalid_argument("combine_scores: length mismatch");
  std::vector<double> out(saliency_norm.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = config.alpha * saliency_norm[i] + config.beta * attention_norm[i];
  return out;
}

// Eligible indices sorted by descending score; equal scores keep index order.
inline std::vector<std::size_t> ranked_eligible(const std::vector<double>& scores,
                                                const std::vector<bool>& eligible) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (eligible[i]) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

// Indices whose score reaches gamma times the best eligible score.
inline std::vector<std::size_t> select_by_threshold(const std::vector<double>& scores,
                                                    const std::vector<bool>& eligible,
                                                    double gamma) {
  if (scores.size() != eligible.size()) throw std::invalid_argument("select: length mismatch");
  auto ranked = ranked_eligible(scores, eligible);
  if (ranked.empty()) throw EmptyEligibleSet();
  const double threshold = gamma * scores[ranked.front()];
  auto cut = std::find_if(ranked.begin(), ranked.end(),
                          [&](std::size_t i) { return !(scores[i] >= threshold); });
  ranked.erase(cut, ranked.end());
  return ranked;
}

inline std::vector<std::size_t> select_top_k(const std::vector<double>& scores,
                                             const std::vector<bool>& eligible, std::size_t k) {
  if (scores.size() != eligible.size()) throw std::invalid_argument("select: length mismatch");
  auto ranked = ranked_eligible(scores, eligible);
  if (ranked.empty()) throw EmptyEligibleSet();
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

// Dispatches on mode: the combined score with the relative threshold for
// sassp, raw saliency top-k for clare.
inline std::vector<std::size_t> select_targets(const TokenScores& scores, const SelectionConfig& config) {
  if (config.mode == AttackMode::clare)
    return select_top_k(scores.saliency, scores.eligible, config.top_k);
  return select_by_threshold(scores.combined, scores.eligible, config.gamma);
}

// Queries the victim and fills every score list. Attention is only requested
// in sassp mode; in clare mode attention fields stay zero.
inline TokenScores score_words(const LabeledExample& example, const VictimOracle& victim,
                               const SelectionConfig& config, std::vector<bool> eligible) {
  TokenScores s;
  const std::size_t n = example.attackable().size();
  if (eligible.size() != n) throw std::invalid_argument("score_words: eligibility length mismatch");
  s.eligible = std::move(eligible);
  s.saliency = compute_saliency(example, victim);
  s.attention = config.mode == AttackMode::sassp ? compute_attention(example, victim)
                                                 : std::vector<double>(n, 0.0);
  s.saliency_norm = normalize_scores(s.saliency, s.eligible);
  s.attention_norm = normalize_scores(s.attention, s.eligible);
  s.combined = combine_scores(s.saliency_norm, s.attention_norm, config);
  for (std::size_t i = 0; i < n; ++i)
    if (!s.eligible[i]) s.combined[i] = 0.0;
  return s;
}

}  // namespace advtext
