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

// The bundled toy fixture, corpus and configuration. Kept byte-identical to
// fixtures/ in the source tree (checked by the harness tests).

#pragma once

#include <string_view>

namespace advtext::toy {

inline constexpr std::string_view kFixture = R"fx(# Toy backend fixture for the bundled demo corpus.
# Word contribution to the logit is (v.e)(u.e) = e[0]*e[1].
dim = 2
v = 1 0
u = 0 1

# positive words
embed good = 2 1
embed friendly = 2 1
embed delicious = 2.5 1
embed lovely = 2 1
embed great = 2.5 1
embed pleasant = 2 1
embed superb = 3 1
embed fresh = 2 1
embed excellent = 3 1
embed fantastic = 2.5 1
embed fine = 1.5 1
embed kind = 1.5 1
embed tasty = 2 1
embed nice = 1.5 1
embed wonderful = 2.5 1

# negative words
embed bad = -2 1
embed rude = -2 1
embed bland = -2.5 1
embed dirty = -2 1
embed awful = -2.5 1
embed noisy = -2 1
embed poor = -3 1
embed stale = -2 1
embed terrible = -3 1
embed boring = -2.5 1

# weakly loaded words
embed warm = 0.3 0.2
embed cold = -0.3 0.2
embed night = 0.1 0.1
embed morning = 0.2 0.1
embed usual = 0.1 -0.2
embed home = 0.2 0.2
embed visit = 0.1 0.3
embed tonight = -0.1 0.2

mlm good = great:0.45 bad:0.25 fine:0.2
mlm friendly = kind:0.5 rude:0.3
mlm delicious = tasty:0.5 bland:0.3
mlm lovely = nice:0.4 dirty:0.35
mlm great = wonderful:0.4 awful:0.3 good:0.2
mlm pleasant = nice:0.45 noisy:0.3
mlm superb = wonderful:0.5 poor:0.2
mlm fresh = warm:0.3 stale:0.25
mlm excellent = superb:0.4 terrible:0.3
mlm fantastic = great:0.4 boring:0.3
mlm bad = poor:0.4 good:0.3
mlm rude = cold:0.4 friendly:0.3
mlm bland = boring:0.4 delicious:0.3
mlm dirty = noisy:0.3 lovely:0.2
mlm awful = terrible:0.5 great:0.25
mlm noisy = busy:0.4 pleasant:0.3
mlm poor = bad:0.4 superb:0.2
mlm stale = cold:0.35 fresh:0.3
mlm terrible = awful:0.45 excellent:0.2
mlm boring = bland:0.4 fantastic:0.3

lm the = 0.08
lm was = 0.05
lm . = 0.1
lm.vocab_size = 64

vocab = . the a our my this there was and to me all long little small near from
vocab = soup waiter pasta tasted hotel room overall staff seemed every cafe view deck
vocab = bread coffee as today music
)fx";

inline constexpr std::string_view kCorpus = R"fx({"text": "The soup was good and warm.", "label": 0}
{"text": "Our waiter was friendly all night.", "label": 0}
{"text": "The pasta tasted delicious to me.", "label": 0}
{"text": "This small hotel room was lovely overall.", "label": 0}
{"text": "The staff seemed great every visit.", "label": 0}
{"text": "A pleasant little cafe near home.", "label": 0}
{"text": "The view from the deck was superb.", "label": 0}
{"text": "The bread was fresh this morning.", "label": 0}
{"text": "My morning coffee was excellent as usual today.", "label": 0}
{"text": "The music there was fantastic tonight.", "label": 0}
{"text": "The soup was bad and cold.", "label": 1}
{"text": "Our waiter was rude all night long.", "label": 1}
{"text": "The pasta tasted bland to me.", "label": 1}
{"text": "This hotel room was dirty overall.", "label": 1}
{"text": "The staff seemed awful every visit.", "label": 1}
{"text": "A noisy little cafe near home.", "label": 1}
{"text": "The view from the deck was poor.", "label": 1}
{"text": "The bread was stale this morning.", "label": 1}
{"text": "My coffee was terrible as usual.", "label": 1}
{"text": "The music there was boring tonight.", "label": 1}
)fx";

inline constexpr std::string_view kConfig = R"fx(# Run configuration for the toy backend. Every key is listed with its default.
mode = sassp

selection.alpha = 0.5
selection.beta = 0.5
selection.gamma = 0.7
selection.top_k = 5

ranking.alpha = 1
ranking.beta = 1
ranking.k_candidates = 50
ranking.objective = gold_drop
ranking.reselect_each_step = false

gate.sim_threshold = 0.8
gate.para_threshold = 0.7

budget.max_edits_fraction = 0.4
budget.max_queries = 2000

oracle.victim = toy
oracle.mlm = toy
oracle.embedder = toy
oracle.paraphraser = toy
oracle.lm = toy
oracle.grammar = toy
oracle.metric_embedder = toy

seed = 0
attack_field = text_b
sample_limit = 0
workers = 1
)fx";

}  // namespace advtext::toy
