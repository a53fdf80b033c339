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

// Helpers for transformer backends: fold subword-level gradients and
// attention maps down to the word level through TokenizedText::subword_spans.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "advtext/core.hpp"

namespace advtext {

// Per word, the L2 norm of the concatenation of its subwords' embedding
// gradients. `grads[p]` is the gradient at subword position p.
inline std::vector<double> word_gradient_norms(const std::vector<std::vector<double>>& grads,
                                               std::span<const SubwordSpan> spans) {
  std::vector<double> out;
  out.reserve(spans.size());
  for (const auto& span : spans) {
    if (span.end > grads.size() || span.begin >= span.end)
      throw OracleContractError("subword span outside gradient sequence");
    double sq = 0.0;
    for (std::size_t p = span.begin; p < span.end; ++p)
      for (double g : grads[p]) sq += g * g;
    out.push_back(std::sqrt(sq));
  }
  return out;
}

// Attention weights of shape [layers][heads][query][key] over `seq_len`
// subword positions, stored row-major.
struct AttentionMaps {
  std::size_t layers = 0;
  std::size_t heads = 0;
  std::size_t seq_len = 0;
  std::vector<double> weights;

  double at(std::size_t l, std::size_t h, std::size_t q, std::size_t k) const {
    return weights[((l * heads + h) * seq_len + q) * seq_len + k];
  }
};

// Mean attention received by each word: for every subword key position, the
// average over layers, heads and non-special query positions; then the mean
// over the word's span. Positions outside every span count as special tokens
// and are excluded. The result is rescaled to sum to one across words.
inline std::vector<double> word_attention_received(const AttentionMaps& maps,
                                                   std::span<const SubwordSpan> spans) {
  if (maps.weights.size() != maps.layers * maps.heads * maps.seq_len * maps.seq_len)
    throw OracleContractError("attention tensor has wrong size");
  std::vector<bool> regular(maps.seq_len, false);
  for (const auto& span : spans) {
    if (span.end > maps.seq_len || span.begin >= span.end)
      throw OracleContractError("subword span outside attention sequence");
    for (std::size_t p = span.begin; p < span.end; ++p) regular[p] = true;
  }
  std::size_t queries = 0;
  for (bool r : regular) queries += r ? 1 : 0;

  std::vector<double> received(maps.seq_len, 0.0);
  if (queries > 0 && maps.layers > 0 && maps.heads > 0) {
    for (std::size_t l = 0; l < maps.layers; ++l)
      for (std::size_t h = 0; h < maps.heads; ++h)
        for (std::size_t q = 0; q < maps.seq_len; ++q) {
          if (!regular[q]) continue;
          for (std::size_t k = 0; k < maps.seq_len; ++k) received[k] += maps.at(l, h, q, k);
        }
    const double denom = static_cast<double>(maps.layers * maps.heads * queries);
    for (double& r : received) r /= denom;
  }

  std::vector<double> out;
  out.reserve(spans.size());
  double total = 0.0;
  for (const auto& span : spans) {
    double s = 0.0;
    for (std::size_t p = span.begin; p < span.end; ++p) s += received[p];
    out.push_back(s / static_cast<double>(span.size()));
    total += out.back();
  }
  if (out.empty()) return out;
  if (total > 0.0) {
    for (double& x : out) x /= total;
  } else {
    for (double& x : out) x = 1.0 / static_cast<double>(out.size());
  }
  return out;
}

}  // namespace advtext
