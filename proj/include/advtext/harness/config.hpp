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

// Flat `key = value` run configuration. Unknown keys, duplicates and
// out-of-range values are all collected before failing.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/perturb.hpp"

namespace advtext::harness {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out = "invalid configuration:";
    for (const auto& s : p) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> problems_;
};

enum class AttackField { text, text_a, text_b };

inline std::string to_string(AttackField f) {
  switch (f) {
    case AttackField::text: return "text";
    case AttackField::text_a: return "text_a";
    case AttackField::text_b: return "text_b";
  }
  return "text";
}

struct OracleIds {
  std::string victim = "toy";
  std::string mlm = "toy";
  std::string embedder = "toy";
  std::string paraphraser = "toy";
  std::string lm = "toy";
  std::string grammar = "toy";
  std::string metric_embedder = "toy";
};

struct RunConfig {
  AttackConfig attack;
  OracleIds oracles;
  std::uint64_t seed = 0;
  AttackField attack_field = AttackField::text_b;
  std::size_t sample_limit = 0;  // 0 keeps every record
  std::size_t workers = 1;
};

// Shortest representation that parses back to the same double.
inline std::string format_real(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

// Every effective parameter, defaults included.
inline std::map<std::string, std::string> echo(const RunConfig& c) {
  const auto& a = c.attack;
  return {
      {"mode", to_string(a.selection.mode)},
      {"selection.alpha", format_real(a.selection.alpha)},
      {"selection.beta", format_real(a.selection.beta)},
      {"selection.gamma", format_real(a.selection.gamma)},
      {"selection.top_k", std::to_string(a.selection.top_k)},
      {"ranking.alpha", format_real(a.ranking.alpha_rank)},
      {"ranking.beta", format_real(a.ranking.beta_rank)},
      {"ranking.k_candidates", std::to_string(a.ranking.k_candidates)},
      {"ranking.objective", to_string(a.ranking.objective)},
      {"ranking.reselect_each_step", a.ranking.reselect_each_step ? "true" : "false"},
      {"gate.sim_threshold", format_real(a.gate.sim_threshold)},
      {"gate.para_threshold", format_real(a.gate.para_threshold)},
      {"budget.max_edits_fraction", format_real(a.budget.max_edits_fraction)},
      {"budget.max_queries", std::to_string(a.budget.max_queries)},
      {"oracle.victim", c.oracles.victim},
      {"oracle.mlm", c.oracles.mlm},
      {"oracle.embedder", c.oracles.embedder},
      {"oracle.paraphraser", c.oracles.paraphraser},
      {"oracle.lm", c.oracles.lm},
      {"oracle.grammar", c.oracles.grammar},
      {"oracle.metric_embedder", c.oracles.metric_embedder},
      {"seed", std::to_string(c.seed)},
      {"attack_field", to_string(c.attack_field)},
      {"sample_limit", std::to_string(c.sample_limit)},
      {"workers", std::to_string(c.workers)},
  };
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& s, double& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_uint(const std::string& s, std::uint64_t& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::vector<std::string> problems;
  std::map<std::string, std::size_t> seen;

  auto real = [&](const std::string& key, const std::string& v, double lo, double hi, bool lo_open,
                  double& dst) {
    double d = 0;
    if (!detail::parse_double(v, d) || (lo_open ? !(d > lo) : !(d >= lo)) || !(d <= hi)) {
      problems.push_back(key + ": expected a number in " + (lo_open ? "(" : "[") + format_real(lo) +
                         ", " + format_real(hi) + "], got '" + v + "'");
      return;
    }
    dst = d;
  };
  auto count = [&](const std::string& key, const std::string& v, std::uint64_t min, auto& dst) {
    std::uint64_t n = 0;
    if (!detail::parse_uint(v, n) || n < min) {
      problems.push_back(key + ": expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
      return;
    }
    dst = static_cast<std::remove_reference_t<decltype(dst)>>(n);
  };
  auto id = [&](const std::string& key, const std::string& v, std::string& dst) {
    if (v.empty()) {
      problems.push_back(key + ": oracle id must not be empty");
      return;
    }
    dst = v;
  };
  constexpr double inf = std::numeric_limits<double>::infinity();

  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> handlers = {
      {"mode",
       [&](auto& k, auto& v) {
         if (v == "sassp") c.attack.selection.mode = AttackMode::sassp;
         else if (v == "clare") c.attack.selection.mode = AttackMode::clare;
         else problems.push_back(k + ": expected sassp or clare, got '" + v + "'");
       }},
      {"selection.alpha", [&](auto& k, auto& v) { real(k, v, 0, inf, false, c.attack.selection.alpha); }},
      {"selection.beta", [&](auto& k, auto& v) { real(k, v, 0, inf, false, c.attack.selection.beta); }},
      {"selection.gamma", [&](auto& k, auto& v) { real(k, v, 0, 1, true, c.attack.selection.gamma); }},
      {"selection.top_k", [&](auto& k, auto& v) { count(k, v, 1, c.attack.selection.top_k); }},
      {"ranking.alpha", [&](auto& k, auto& v) { real(k, v, 0, inf, false, c.attack.ranking.alpha_rank); }},
      {"ranking.beta", [&](auto& k, auto& v) { real(k, v, 0, inf, false, c.attack.ranking.beta_rank); }},
      {"ranking.k_candidates", [&](auto& k, auto& v) { count(k, v, 1, c.attack.ranking.k_candidates); }},
      {"ranking.objective",
       [&](auto& k, auto& v) {
         if (v == "gold_drop") c.attack.ranking.objective = Objective::gold_drop;
         else if (v == "stable_output") c.attack.ranking.objective = Objective::stable_output;
         else problems.push_back(k + ": expected gold_drop or stable_output, got '" + v + "'");
       }},
      {"ranking.reselect_each_step",
       [&](auto& k, auto& v) {
         if (v == "true") c.attack.ranking.reselect_each_step = true;
         else if (v == "false") c.attack.ranking.reselect_each_step = false;
         else problems.push_back(k + ": expected true or false, got '" + v + "'");
       }},
      {"gate.sim_threshold", [&](auto& k, auto& v) { real(k, v, 0, 1, false, c.attack.gate.sim_threshold); }},
      {"gate.para_threshold", [&](auto& k, auto& v) { real(k, v, 0, 1, false, c.attack.gate.para_threshold); }},
      {"budget.max_edits_fraction",
       [&](auto& k, auto& v) { real(k, v, 0, 1, false, c.attack.budget.max_edits_fraction); }},
      {"budget.max_queries", [&](auto& k, auto& v) { count(k, v, 0, c.attack.budget.max_queries); }},
      {"oracle.victim", [&](auto& k, auto& v) { id(k, v, c.oracles.victim); }},
      {"oracle.mlm", [&](auto& k, auto& v) { id(k, v, c.oracles.mlm); }},
      {"oracle.embedder", [&](auto& k, auto& v) { id(k, v, c.oracles.embedder); }},
      {"oracle.paraphraser", [&](auto& k, auto& v) { id(k, v, c.oracles.paraphraser); }},
      {"oracle.lm", [&](auto& k, auto& v) { id(k, v, c.oracles.lm); }},
      {"oracle.grammar", [&](auto& k, auto& v) { id(k, v, c.oracles.grammar); }},
      {"oracle.metric_embedder", [&](auto& k, auto& v) { id(k, v, c.oracles.metric_embedder); }},
      {"seed", [&](auto& k, auto& v) { count(k, v, 0, c.seed); }},
      {"attack_field",
       [&](auto& k, auto& v) {
         if (v == "text") c.attack_field = AttackField::text;
         else if (v == "text_a") c.attack_field = AttackField::text_a;
         else if (v == "text_b") c.attack_field = AttackField::text_b;
         else problems.push_back(k + ": expected text, text_a or text_b, got '" + v + "'");
       }},
      {"sample_limit", [&](auto& k, auto& v) { count(k, v, 0, c.sample_limit); }},
      {"workers", [&](auto& k, auto& v) { count(k, v, 1, c.workers); }},
  };

  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    const auto where = "line " + std::to_string(line) + ": ";
    const auto eq = raw.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + "expected 'key = value'");
      continue;
    }
    const auto key = detail::trim(raw.substr(0, eq));
    const auto value = detail::trim(raw.substr(eq + 1));
    auto h = handlers.find(key);
    if (h == handlers.end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (auto [it, fresh] = seen.emplace(key, line); !fresh) {
      problems.push_back(where + "duplicate key '" + key + "' (first set on line " +
                         std::to_string(it->second) + ")");
      continue;
    }
    h->second(where + key, value);
  }

  if (!(c.attack.selection.alpha + c.attack.selection.beta > 0))
    problems.push_back("selection.alpha + selection.beta must be > 0");
  if (!(c.attack.ranking.alpha_rank + c.attack.ranking.beta_rank > 0))
    problems.push_back("ranking.alpha + ranking.beta must be > 0");
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace advtext::harness
