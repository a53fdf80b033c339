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

// Evaluation metrics: attack success rate, perplexity, word manipulation
// rate, newly introduced grammar errors and semantic similarity. Means are
// taken over successful attacks only.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/core.hpp"
#include "advtext/perturb.hpp"
#include "advtext/semfilter.hpp"

namespace advtext {

class NoAdmittedSamples : public std::runtime_error {
 public:
  NoAdmittedSamples() : std::runtime_error("no admitted samples") {}
};

struct SampleMetrics {
  bool success = false;
  double wmr = 0.0;
  std::optional<double> perplexity;
  std::optional<std::size_t> sye;
  std::optional<double> ses;
};

// NaN marks a mean with no contributing samples.
struct AggregateReport {
  double asr = std::numeric_limits<double>::quiet_NaN();
  double mean_per = std::numeric_limits<double>::quiet_NaN();
  double mean_wmr = std::numeric_limits<double>::quiet_NaN();  // percent
  double mean_sye = std::numeric_limits<double>::quiet_NaN();
  double mean_ses = std::numeric_limits<double>::quiet_NaN();
  std::size_t sample_count = 0;
  std::size_t skipped_count = 0;
  std::size_t admitted_count = 0;
  std::size_t success_count = 0;
  // Successful samples whose metric could not be computed.
  std::size_t per_excluded = 0;
  std::size_t sye_excluded = 0;
  std::size_t ses_excluded = 0;
  std::map<std::string, std::string> config;
};

inline double attack_success_rate(const std::vector<AttackResult>& results) {
  std::size_t admitted = 0, successes = 0;
  for (const auto& r : results) {
    if (!r.admitted()) continue;
    ++admitted;
    if (r.success) ++successes;
  }
  if (admitted == 0) throw NoAdmittedSamples();
  return 100.0 * static_cast<double>(successes) / static_cast<double>(admitted);
}

inline double word_manipulation_rate(const AttackResult& result) {
  const std::size_t n = result.original.attackable().size();
  if (n == 0) return 0.0;
  return static_cast<double>(result.edits.size()) / static_cast<double>(n);
}

inline double perplexity(const std::string& text, const CausalLMOracle& lm) {
  if (text.empty()) throw std::invalid_argument("perplexity of empty text");
  const LogLikelihood ll = lm.log_likelihood(text);
  if (ll.token_count == 0) throw OracleContractError("language model scored zero tokens");
  return std::exp(-ll.sum_log_prob / static_cast<double>(ll.token_count));
}

inline std::size_t syntactic_errors(const std::string& original, const std::string& adversarial,
                                    const GrammarOracle& grammar) {
  const std::size_t before = grammar.error_count(original);
  const std::size_t after = grammar.error_count(adversarial);
  return after > before ? after - before : 0;
}

inline double semantic_similarity_metric(const std::string& original, const std::string& adversarial,
                                         const SentenceEmbedOracle& embedder) {
  return embedding_similarity(original, adversarial, embedder);
}

// Per-sample metrics; an oracle failure leaves the affected metric unset.
inline SampleMetrics compute_sample_metrics(const AttackResult& result, const OracleSuite& oracles) {
  SampleMetrics m;
  m.success = result.success;
  m.wmr = word_manipulation_rate(result);
  if (!result.success) return m;
  const std::string original = detokenize(result.original.attackable());
  const std::string adversarial = detokenize(result.adversarial_text);
  try {
    m.perplexity = perplexity(adversarial, *oracles.lm);
  } catch (const std::exception&) {
  }
  try {
    m.sye = syntactic_errors(original, adversarial, *oracles.grammar);
  } catch (const std::exception&) {
  }
  try {
    m.ses = semantic_similarity_metric(original, adversarial, oracles.ses_embedder());
  } catch (const std::exception&) {
  }
  return m;
}

namespace detail {

// Summing in sorted order makes the mean independent of input order.
inline double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace detail

inline AggregateReport aggregate(const std::vector<AttackResult>& results,
                                 const std::vector<SampleMetrics>& metrics) {
  if (results.size() != metrics.size()) throw std::invalid_argument("aggregate: length mismatch");
  AggregateReport rep;
  rep.sample_count = results.size();
  std::vector<double> per, wmr, sye, ses;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].admitted()) {
      ++rep.skipped_count;
      continue;
    }
    ++rep.admitted_count;
    if (!results[i].success) continue;
    ++rep.success_count;
    const auto& m = metrics[i];
    wmr.push_back(m.wmr);
    if (m.perplexity)
      per.push_back(*m.perplexity);
    else
      ++rep.per_excluded;
    if (m.sye)
      sye.push_back(static_cast<double>(*m.sye));
    else
      ++rep.sye_excluded;
    if (m.ses)
      ses.push_back(*m.ses);
    else
      ++rep.ses_excluded;
  }
  if (rep.admitted_count == 0) throw NoAdmittedSamples();
  rep.asr = 100.0 * static_cast<double>(rep.success_count) / static_cast<double>(rep.admitted_count);
  if (!wmr.empty()) rep.mean_wmr = 100.0 * detail::sorted_mean(std::move(wmr));
  if (!per.empty()) rep.mean_per = detail::sorted_mean(std::move(per));
  if (!sye.empty()) rep.mean_sye = detail::sorted_mean(std::move(sye));
  if (!ses.empty()) rep.mean_ses = detail::sorted_mean(std::move(ses));
  return rep;
}

}  // namespace advtext
