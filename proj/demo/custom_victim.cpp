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

// Plugs a hand-written victim into the attack loop and borrows the remaining
// oracles from the toy backend.

#include <cmath>
#include <iostream>
#include <map>
#include <memory>

#include "advtext/advtext.hpp"
#include "advtext/toy_fixture.hpp"

namespace {

// Logistic regression over a sentiment lexicon. Gradient norms are the
// absolute lexicon weights scaled by the loss residual; attention is uniform.
class LexiconVictim final : public advtext::VictimOracle {
 public:
  explicit LexiconVictim(std::map<std::string, double> weights) : weights_(std::move(weights)) {}

  std::size_t num_classes() const override { return 2; }

  advtext::PredictionProfile predict(const advtext::LabeledExample& ex) const override {
    const double z = logit(ex);
    return advtext::PredictionProfile({advtext::toy::sigmoid(z), advtext::toy::sigmoid(-z)});
  }

  std::vector<double> loss_gradient_norms(const advtext::LabeledExample& ex, int gold) const override {
    const double resid = std::abs(advtext::toy::ToyVictim::residual(logit(ex), gold));
    std::vector<double> out;
    for (const auto& w : ex.attackable().words) out.push_back(resid * std::abs(weight(w)));
    return out;
  }

  std::vector<double> attention_received(const advtext::LabeledExample& ex) const override {
    const auto n = ex.attackable().size();
    return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  }

 private:
  double weight(const std::string& w) const {
    auto it = weights_.find(advtext::to_lower(w));
    return it == weights_.end() ? 0.0 : it->second;
  }
  double logit(const advtext::LabeledExample& ex) const {
    double z = 0.0;
    for (const auto& w : ex.attackable().words) z += weight(w);
    return z;
  }
  std::map<std::string, double> weights_;
};

}  // namespace

int main() {
  auto oracles = advtext::toy::make_suite(advtext::toy::parse_fixture(std::string(advtext::toy::kFixture)));
  oracles.victim = std::make_shared<LexiconVictim>(
      std::map<std::string, double>{{"good", 2.0}, {"great", 2.5}, {"bad", -2.0}, {"poor", -3.0}});

  advtext::LabeledExample ex;
  ex.text_a = advtext::tokenize("The soup was good and warm.");
  ex.gold_label = 0;

  const auto result = advtext::run_attack(ex, oracles, advtext::AttackConfig{});
  std::cout << "status:      " << advtext::to_string(result.status) << "\n"
            << "adversarial: " << advtext::detokenize(result.adversarial_text) << "\n"
            << "queries:     " << result.queries_used << "\n";
  for (const auto& e : result.edits)
    std::cout << "edit:        [" << e.index << "] " << e.original_word << " -> " << e.new_word << "\n";
  return result.success ? 0 : 1;
}
