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

// Two-stage semantic gate: sentence-embedding cosine similarity first, then
// paraphrase probability for candidates that survive the first stage.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/core.hpp"

namespace advtext {

struct GateConfig {
  double sim_threshold = 0.80;
  double para_threshold = 0.70;
};

// Paraphrase score of a verdict whose similarity stage failed.
inline constexpr double kUnevaluated = std::numeric_limits<double>::quiet_NaN();

inline bool is_unevaluated(double score) { return std::isnan(score); }

struct GateVerdict {
  double sim_score = 0.0;
  double para_score = kUnevaluated;
  bool passed_sim = false;
  bool passed_para = false;
  bool passed = false;
};

// Cosine of two vectors, clamped to [-1,1]. sqrt(x*x) == |x| in IEEE
// arithmetic, so identical vectors give exactly 1.
inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw OracleContractError("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVector("embedding has zero norm");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

inline double embedding_similarity(const std::string& a, const std::string& b,
                                   const SentenceEmbedOracle& embedder) {
  if (a.empty() || b.empty()) throw std::invalid_argument("similarity of empty text");
  return cosine_similarity(embedder.embed(a), embedder.embed(b));
}

inline double paraphrase_probability(const std::string& a, const std::string& b,
                                     const ParaphraseOracle& paraphraser) {
  if (a.empty() || b.empty()) throw std::invalid_argument("paraphrase score of empty text");
  const double s = paraphraser.score(a, b);
  if (std::isnan(s)) throw OracleContractError("paraphrase score is NaN");
  return std::clamp(s, 0.0, 1.0);
}

inline GateVerdict gate(const std::string& original, const std::string& candidate_text,
                        const OracleSuite& oracles, const GateConfig& config) {
  GateVerdict v;
  v.sim_score = embedding_similarity(original, candidate_text, *oracles.embedder);
  v.passed_sim = v.sim_score >= config.sim_threshold;
  if (v.passed_sim) {
    v.para_score = paraphrase_probability(original, candidate_text, *oracles.paraphraser);
    v.passed_para = v.para_score >= config.para_threshold;
  }
  v.passed = v.passed_sim && v.passed_para;
  return v;
}

}  // namespace advtext
