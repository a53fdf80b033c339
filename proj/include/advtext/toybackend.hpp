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

// Deterministic, analytically tractable implementations of all six oracles.
//
// The toy victim is a binary classifier with logit
//
//   z = sum_i (v . e_i) (u . e_i)
//
// over the word embeddings e_i of both segments, and class probabilities
// (sigmoid(z), sigmoid(-z)). The quadratic form makes the per-word gradient
// norm word dependent, so saliency rankings can be checked by hand.
//
// Fixture format (one directive per line, '#' starts a comment):
//
//   dim = 2
//   v = 1 0
//   u = 0 1
//   embed good = 2 1
//   mlm good = great:0.45 bad:0.25
//   lm the = 0.2
//   lm.vocab_size = 40
//   vocab = soup was and
//
// All word keys are matched case-insensitively.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/core.hpp"

namespace advtext::toy {

class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ToyVictimSpec {
  std::size_t dim = 2;
  std::map<std::string, std::vector<double>> embeddings;
  std::vector<double> v{1.0, 0.0};
  std::vector<double> u{0.0, 1.0};
};

using ToyMlmTable = std::map<std::string, std::vector<FillCandidate>>;

struct ToyFixture {
  ToyVictimSpec victim;
  ToyMlmTable mlm;
  std::map<std::string, double> lm_probs;
  std::size_t lm_vocab_size = 0;  // 0: derived from the embedder vocabulary
  std::set<std::string> extra_vocab;
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow or loss of small values.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Lowercased word tokens of a raw string.
inline std::vector<std::string> toy_words(const std::string& text) {
  auto t = tokenize(text);
  for (auto& w : t.words) w = to_lower(w);
  return t.words;
}

// ---------------------------------------------------------------------------
// Victim
// ---------------------------------------------------------------------------

class ToyVictim final : public VictimOracle {
 public:
  explicit ToyVictim(ToyVictimSpec spec) : spec_(std::move(spec)) {
    if (spec_.dim < 2) throw FixtureError("toy victim needs dim >= 2");
    if (spec_.v.size() != spec_.dim || spec_.u.size() != spec_.dim)
      throw FixtureError("v and u must have dimension dim");
    for (const auto& [w, e] : spec_.embeddings)
      if (e.size() != spec_.dim) throw FixtureError("embedding for '" + w + "' has wrong dimension");
  }

  const ToyVictimSpec& spec() const { return spec_; }

  std::vector<double> embedding(const std::string& word) const {
    auto it = spec_.embeddings.find(to_lower(word));
    return it == spec_.embeddings.end() ? std::vector<double>(spec_.dim, 0.0) : it->second;
  }

  double contribution(const std::vector<double>& e) const { return dot(spec_.v, e) * dot(spec_.u, e); }

  double logit(const LabeledExample& ex) const {
    double z = 0.0;
    for (const auto& w : ex.text_a.words) z += contribution(embedding(w));
    if (ex.text_b)
      for (const auto& w : ex.text_b->words) z += contribution(embedding(w));
    return z;
  }

  std::size_t num_classes() const override { return 2; }

  PredictionProfile predict(const LabeledExample& ex) const override {
    const double z = logit(ex);
    return PredictionProfile({sigmoid(z), sigmoid(-z)});
  }

  // dL/dz for cross-entropy with target y = 1 for class 0. Written so that
  // saturated logits keep full relative precision.
  static double residual(double z, int gold) { return gold == 0 ? -sigmoid(-z) : sigmoid(z); }

  // dL/de = residual * [(u.e) v + (v.e) u]
  std::vector<double> word_gradient(const std::vector<double>& e, double resid) const {
    const double ue = dot(spec_.u, e), ve = dot(spec_.v, e);
    std::vector<double> g(spec_.dim);
    for (std::size_t k = 0; k < spec_.dim; ++k) g[k] = resid * (ue * spec_.v[k] + ve * spec_.u[k]);
    return g;
  }

  std::vector<double> loss_gradient_norms(const LabeledExample& ex, int gold) const override {
    const double resid = residual(logit(ex), gold);
    std::vector<double> out;
    for (const auto& w : ex.attackable().words) {
      const auto g = word_gradient(embedding(w), resid);
      out.push_back(std::sqrt(dot(g, g)));
    }
    return out;
  }

  // One layer, one head: softmax of the logits (u . e_i) over the words.
  std::vector<double> attention_received(const LabeledExample& ex) const override {
    const auto& words = ex.attackable().words;
    std::vector<double> logits;
    for (const auto& w : words) logits.push_back(dot(spec_.u, embedding(w)));
    if (logits.empty()) return logits;
    const double hi = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& l : logits) {
      l = std::exp(l - hi);
      sum += l;
    }
    for (double& l : logits) l /= sum;
    return logits;
  }

 private:
  ToyVictimSpec spec_;
};

// ---------------------------------------------------------------------------
// Mask filling
// ---------------------------------------------------------------------------

class ToyMaskFill final : public MaskFillOracle {
 public:
  explicit ToyMaskFill(ToyMlmTable table) : table_(std::move(table)) {
    for (const auto& [w, cands] : table_) {
      std::set<double> probs;
      for (const auto& c : cands) {
        if (!(c.probability > 0.0 && c.probability <= 1.0))
          throw FixtureError("mlm probability for '" + w + "' outside (0,1]");
        if (!probs.insert(c.probability).second)
          throw FixtureError("mlm probabilities for '" + w + "' must be distinct");
      }
    }
  }

  // The table row of the masked-out word, truncated to k.
  std::vector<FillCandidate> fill(const MaskedContext& ctx, std::size_t k) const override {
    auto it = table_.find(to_lower(ctx.original_word));
    if (it == table_.end()) return {};
    std::vector<FillCandidate> out = it->second;
    if (out.size() > k) out.resize(k);
    return out;
  }

 private:
  ToyMlmTable table_;
};

// ---------------------------------------------------------------------------
// Embedding, paraphrase, language model, grammar
// ---------------------------------------------------------------------------

// Word-count vector over a fixed vocabulary plus one overflow slot.
class ToyEmbedder final : public SentenceEmbedOracle {
 public:
  explicit ToyEmbedder(const std::set<std::string>& vocabulary) {
    for (const auto& w : vocabulary) index_.emplace(to_lower(w), index_.size());
  }

  std::size_t dimension() const { return index_.size() + 1; }

  std::vector<double> embed(const std::string& text) const override {
    std::vector<double> counts(dimension(), 0.0);
    for (const auto& w : toy_words(text)) {
      auto it = index_.find(w);
      counts[it == index_.end() ? index_.size() : it->second] += 1.0;
    }
    return counts;
  }

 private:
  std::map<std::string, std::size_t> index_;
};

// F1 of the token multiset overlap.
class ToyParaphraser final : public ParaphraseOracle {
 public:
  double score(const std::string& a, const std::string& b) const override {
    std::map<std::string, std::size_t> ca, cb;
    const auto wa = toy_words(a), wb = toy_words(b);
    for (const auto& w : wa) ++ca[w];
    for (const auto& w : wb) ++cb[w];
    std::size_t overlap = 0;
    for (const auto& [w, n] : ca) {
      auto it = cb.find(w);
      if (it != cb.end()) overlap += std::min(n, it->second);
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / static_cast<double>(wb.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(wa.size());
    return 2.0 * precision * recall / (precision + recall);
  }
};

// Per-token probabilities from a table, uniform 1/vocab_size otherwise.
class ToyLanguageModel final : public CausalLMOracle {
 public:
  ToyLanguageModel(std::map<std::string, double> probs, std::size_t vocab_size)
      : probs_(std::move(probs)), vocab_size_(vocab_size) {
    if (vocab_size_ == 0) throw FixtureError("lm vocabulary size must be positive");
    for (const auto& [w, p] : probs_)
      if (!(p > 0.0 && p <= 1.0)) throw FixtureError("lm probability for '" + w + "' outside (0,1]");
  }

  LogLikelihood log_likelihood(const std::string& text) const override {
    LogLikelihood ll;
    for (const auto& w : toy_words(text)) {
      auto it = probs_.find(w);
      ll.sum_log_prob += std::log(it == probs_.end() ? 1.0 / static_cast<double>(vocab_size_) : it->second);
      ++ll.token_count;
    }
    return ll;
  }

 private:
  std::map<std::string, double> probs_;
  std::size_t vocab_size_;
};

// Counts four rule violations: repeated consecutive words, a lowercase word
// right after sentence-final punctuation, unbalanced brackets or double
// quotes, and whitespace before punctuation.
class ToyGrammar final : public GrammarOracle {
 public:
  std::size_t error_count(const std::string& text) const override {
    std::size_t errors = 0;
    const auto words = tokenize(text).words;
    for (std::size_t i = 1; i < words.size(); ++i) {
      if (!is_punctuation(words[i]) && iequals(words[i], words[i - 1])) ++errors;
      const auto& prev = words[i - 1];
      if ((prev == "." || prev == "!" || prev == "?") &&
          std::islower(static_cast<unsigned char>(words[i][0])))
        ++errors;
    }
    std::vector<char> stack;
    std::size_t quotes = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (c == '(' || c == '[' || c == '{') stack.push_back(c);
      if (c == ')' || c == ']' || c == '}') {
        const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
        if (!stack.empty() && stack.back() == open)
          stack.pop_back();
        else
          ++errors;
      }
      if (c == '"') ++quotes;
      if (c == ' ' && i + 1 < text.size()) {
        const char n = text[i + 1];
        if (n == ',' || n == '.' || n == '!' || n == '?' || n == ';' || n == ':') ++errors;
      }
    }
    errors += stack.size() + quotes % 2;
    return errors;
  }
};

// ---------------------------------------------------------------------------
// Fixture loading
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline double parse_real(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return d;
  } catch (const std::exception&) {
    throw FixtureError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
}

inline std::vector<double> parse_vector(const std::string& s, std::size_t line) {
  std::vector<double> out;
  for (const auto& tok : split_ws(s)) out.push_back(parse_real(tok, line));
  return out;
}

}  // namespace detail

inline ToyFixture parse_fixture(const std::string& text) {
  ToyFixture fx;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool have_dim = false;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    const auto where = "line " + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw FixtureError(where + "expected 'key = value'");
    const auto lhs = detail::split_ws(raw.substr(0, eq));
    const auto rhs = detail::trim(raw.substr(eq + 1));
    if (lhs.empty()) throw FixtureError(where + "missing key");
    const auto& key = lhs[0];
    const bool keyed = lhs.size() == 2;
    if (lhs.size() > 2) throw FixtureError(where + "too many words before '='");

    if (key == "dim" && !keyed) {
      const double d = detail::parse_real(rhs, line);
      if (d < 2 || d != std::floor(d)) throw FixtureError(where + "dim must be an integer >= 2");
      fx.victim.dim = static_cast<std::size_t>(d);
      have_dim = true;
    } else if (key == "v" && !keyed) {
      fx.victim.v = detail::parse_vector(rhs, line);
    } else if (key == "u" && !keyed) {
      fx.victim.u = detail::parse_vector(rhs, line);
    } else if (key == "embed" && keyed) {
      fx.victim.embeddings[to_lower(lhs[1])] = detail::parse_vector(rhs, line);
    } else if (key == "mlm" && keyed) {
      auto& row = fx.mlm[to_lower(lhs[1])];
      for (const auto& item : detail::split_ws(rhs)) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos || colon == 0)
          throw FixtureError(where + "mlm entries must be word:probability");
        row.push_back({item.substr(0, colon), detail::parse_real(item.substr(colon + 1), line)});
      }
    } else if (key == "lm" && keyed) {
      fx.lm_probs[to_lower(lhs[1])] = detail::parse_real(rhs, line);
    } else if (key == "lm.vocab_size" && !keyed) {
      const double d = detail::parse_real(rhs, line);
      if (d < 1 || d != std::floor(d)) throw FixtureError(where + "lm.vocab_size must be a positive integer");
      fx.lm_vocab_size = static_cast<std::size_t>(d);
    } else if (key == "vocab" && !keyed) {
      for (const auto& w : detail::split_ws(rhs)) fx.extra_vocab.insert(to_lower(w));
    } else {
      throw FixtureError(where + "unknown directive '" + raw.substr(0, eq) + "'");
    }
  }
  if (!have_dim) fx.victim.dim = fx.victim.v.size();
  return fx;
}

inline ToyFixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open fixture " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fixture(ss.str());
}

// Every word the fixture mentions.
inline std::set<std::string> fixture_vocabulary(const ToyFixture& fx) {
  std::set<std::string> vocab = fx.extra_vocab;
  for (const auto& [w, e] : fx.victim.embeddings) vocab.insert(w);
  for (const auto& [w, row] : fx.mlm) {
    vocab.insert(w);
    for (const auto& c : row) vocab.insert(to_lower(c.word));
  }
  for (const auto& [w, p] : fx.lm_probs) vocab.insert(w);
  return vocab;
}

inline OracleSuite make_suite(const ToyFixture& fx) {
  const auto vocab = fixture_vocabulary(fx);
  OracleSuite s;
  s.victim = std::make_shared<ToyVictim>(fx.victim);
  s.mlm = std::make_shared<ToyMaskFill>(fx.mlm);
  s.embedder = std::make_shared<ToyEmbedder>(vocab);
  s.paraphraser = std::make_shared<ToyParaphraser>();
  s.lm = std::make_shared<ToyLanguageModel>(fx.lm_probs,
                                            fx.lm_vocab_size ? fx.lm_vocab_size : vocab.size() + 1);
  s.grammar = std::make_shared<ToyGrammar>();
  return s;
}

}  // namespace advtext::toy
