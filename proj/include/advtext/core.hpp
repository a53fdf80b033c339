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

// Domain types shared by every attack stage, plus the oracle interfaces that
// decouple the attack algorithm from concrete model implementations.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace advtext {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class IndexOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// No word of the attackable text may be perturbed.
class EmptyEligibleSet : public std::runtime_error {
 public:
  EmptyEligibleSet() : std::runtime_error("no eligible word to perturb") {}
};

// An embedding oracle returned a zero-norm vector.
class ZeroVector : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An oracle broke its interface contract (wrong length, out-of-range value).
class OracleContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Text
// ---------------------------------------------------------------------------

// Half-open range [begin, end) into a backend's subword sequence.
struct SubwordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const SubwordSpan&, const SubwordSpan&) = default;
};

struct TokenizedText {
  std::vector<std::string> words;
  std::vector<SubwordSpan> subword_spans;
  std::string raw;

  std::size_t size() const { return words.size(); }
  bool empty() const { return words.empty(); }

  friend bool operator==(const TokenizedText& a, const TokenizedText& b) {
    return a.words == b.words;
  }
};

namespace detail {

inline bool is_opening_char(char c) {
  return c == '(' || c == '[' || c == '{' || c == '$' || c == '#';
}

inline bool is_closing_char(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case ')': case ']': case '}': case '%':
      return true;
    default:
      return false;
  }
}

}  // namespace detail

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && to_lower(a) == to_lower(b);
}

// True for a non-empty token made only of ASCII punctuation.
inline bool is_punctuation(std::string_view word) {
  if (word.empty()) return false;
  return std::all_of(word.begin(), word.end(),
                     [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; });
}

// One subword per word, in order.
inline std::vector<SubwordSpan> identity_spans(std::size_t n) {
  std::vector<SubwordSpan> spans(n);
  for (std::size_t i = 0; i < n; ++i) spans[i] = {i, i + 1};
  return spans;
}

// Joins words with single spaces; closing punctuation attaches to the previous
// word, opening punctuation to the next. Double quotes alternate open/close.
inline std::string detokenize(const std::vector<std::string>& words) {
  std::string out;
  bool glue_next = false;
  std::size_t quotes = 0;
  for (const auto& w : words) {
    bool opening = w.size() == 1 && detail::is_opening_char(w[0]);
    bool closing = w.size() == 1 && detail::is_closing_char(w[0]);
    if (w == "\"") {
      opening = quotes % 2 == 0;
      closing = !opening;
      ++quotes;
    }
    if (!out.empty() && !closing && !glue_next) out += ' ';
    out += w;
    glue_next = opening;
  }
  return out;
}

inline std::string detokenize(const TokenizedText& text) { return detokenize(text.words); }

inline TokenizedText make_text(std::vector<std::string> words) {
  TokenizedText t;
  t.subword_spans = identity_spans(words.size());
  t.raw = detokenize(words);
  t.words = std::move(words);
  return t;
}

// Whitespace split, then opening punctuation peeled off the front of each chunk
// and closing punctuation off the back. Word-internal punctuation (apostrophes,
// hyphens, decimal points) stays in place.
inline TokenizedText tokenize(std::string_view raw) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    std::size_t j = i;
    while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
    if (j > i) {
      std::string_view chunk = raw.substr(i, j - i);
      std::size_t lo = 0;
      while (lo < chunk.size() && (detail::is_opening_char(chunk[lo]) || chunk[lo] == '"')) {
        words.emplace_back(1, chunk[lo]);
        ++lo;
      }
      std::size_t hi = chunk.size();
      while (hi > lo && (detail::is_closing_char(chunk[hi - 1]) || chunk[hi - 1] == '"')) --hi;
      if (hi > lo) words.emplace_back(chunk.substr(lo, hi - lo));
      for (std::size_t k = hi; k < chunk.size(); ++k) words.emplace_back(1, chunk[k]);
    }
    i = j;
  }
  TokenizedText t;
  t.subword_spans = identity_spans(words.size());
  t.words = std::move(words);
  t.raw = std::string(raw);
  return t;
}

// ---------------------------------------------------------------------------
// Examples and predictions
// ---------------------------------------------------------------------------

enum class Segment { a, b };

struct LabeledExample {
  TokenizedText text_a;
  std::optional<TokenizedText> text_b;
  int gold_label = 0;
  // Which member of the pair the attack perturbs. Ignored for single texts.
  Segment target = Segment::b;

  bool is_pair() const { return text_b.has_value(); }
  Segment attacked_segment() const { return is_pair() ? target : Segment::a; }

  const TokenizedText& attackable() const {
    return attacked_segment() == Segment::b ? *text_b : text_a;
  }

  // Copy with the attacked segment replaced.
  LabeledExample with_attackable(TokenizedText text) const {
    LabeledExample e = *this;
    if (attacked_segment() == Segment::b)
      e.text_b = std::move(text);
    else
      e.text_a = std::move(text);
    return e;
  }
};

class PredictionProfile {
 public:
  PredictionProfile() = default;

  // Validates normalization and sets the argmax (lowest index wins ties).
  explicit PredictionProfile(std::vector<double> probabilities)
      : probs_(std::move(probabilities)) {
    if (probs_.empty()) throw OracleContractError("empty class probability vector");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) throw OracleContractError("negative or NaN class probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw OracleContractError("class probabilities do not sum to 1");
    label_ = static_cast<int>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
  }

  const std::vector<double>& class_probabilities() const { return probs_; }
  int predicted_label() const { return label_; }
  std::size_t num_classes() const { return probs_.size(); }

  double probability_of(int label) const {
    if (label < 0 || static_cast<std::size_t>(label) >= probs_.size())
      throw IndexOutOfRange("label outside class range");
    return probs_[static_cast<std::size_t>(label)];
  }

  friend bool operator==(const PredictionProfile&, const PredictionProfile&) = default;

 private:
  std::vector<double> probs_;
  int label_ = 0;
};

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

// Every oracle advertises whether concurrent calls are safe. The harness
// serializes calls to oracles that return false.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual bool concurrent_safe() const { return true; }
};

class VictimOracle : public Oracle {
 public:
  virtual std::size_t num_classes() const = 0;
  virtual PredictionProfile predict(const LabeledExample& example) const = 0;
  // Per attackable word, the norm of dL/de over the word's subword embeddings.
  virtual std::vector<double> loss_gradient_norms(const LabeledExample& example,
                                                  int gold_label) const = 0;
  // Per attackable word, the aggregated attention it receives, in [0,1].
  virtual std::vector<double> attention_received(const LabeledExample& example) const = 0;
};

struct MaskedContext {
  TokenizedText text;
  std::size_t mask_index = 0;
  // The word that was masked out. Real MLMs ignore it; table backends key on it.
  std::string original_word;
};

struct FillCandidate {
  std::string word;
  double probability = 0.0;
};

class MaskFillOracle : public Oracle {
 public:
  virtual std::string mask_symbol() const { return "[MASK]"; }
  virtual std::vector<FillCandidate> fill(const MaskedContext& context, std::size_t k) const = 0;
};

class SentenceEmbedOracle : public Oracle {
 public:
  virtual std::vector<double> embed(const std::string& text) const = 0;
};

class ParaphraseOracle : public Oracle {
 public:
  virtual double score(const std::string& a, const std::string& b) const = 0;
};

struct LogLikelihood {
  double sum_log_prob = 0.0;  // natural log
  std::size_t token_count = 0;
};

class CausalLMOracle : public Oracle {
 public:
  virtual LogLikelihood log_likelihood(const std::string& text) const = 0;
};

class GrammarOracle : public Oracle {
 public:
  virtual std::size_t error_count(const std::string& text) const = 0;
};

struct OracleSuite {
  std::shared_ptr<const VictimOracle> victim;
  std::shared_ptr<const MaskFillOracle> mlm;
  std::shared_ptr<const SentenceEmbedOracle> embedder;
  std::shared_ptr<const ParaphraseOracle> paraphraser;
  std::shared_ptr<const CausalLMOracle> lm;
  std::shared_ptr<const GrammarOracle> grammar;
  // Embedder for the reported similarity metric; falls back to `embedder`.
  std::shared_ptr<const SentenceEmbedOracle> metric_embedder;

  const SentenceEmbedOracle& ses_embedder() const {
    return metric_embedder ? *metric_embedder : *embedder;
  }
};

// ---------------------------------------------------------------------------
// Contract-checked oracle calls
// ---------------------------------------------------------------------------

inline PredictionProfile checked_predict(const VictimOracle& victim, const LabeledExample& example) {
  PredictionProfile p = victim.predict(example);
  if (p.num_classes() != victim.num_classes())
    throw OracleContractError("prediction has wrong class count");
  return p;
}

inline std::vector<double> checked_gradient_norms(const VictimOracle& victim,
                                                  const LabeledExample& example, int gold) {
  auto g = victim.loss_gradient_norms(example, gold);
  if (g.size() != example.attackable().size())
    throw OracleContractError("gradient norms: expected one value per word");
  for (double x : g)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw OracleContractError("gradient norms must be finite and non-negative");
  return g;
}

inline std::vector<double> checked_attention(const VictimOracle& victim, const LabeledExample& example) {
  auto a = victim.attention_received(example);
  if (a.size() != example.attackable().size())
    throw OracleContractError("attention: expected one value per word");
  for (double x : a)
    if (!(x >= 0.0 && x <= 1.0)) throw OracleContractError("attention must lie in [0,1]");
  return a;
}

}  // namespace advtext
