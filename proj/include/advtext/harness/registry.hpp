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

// Resolves oracle ids of the form `backend` or `backend:argument` to oracle
// instances. Each backend builds a full suite; a role picks its member.

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/core.hpp"
#include "advtext/harness/config.hpp"
#include "advtext/toy_fixture.hpp"
#include "advtext/toybackend.hpp"

namespace advtext::harness {

class OracleRegistry {
 public:
  // Receives the text after ':' (empty when absent) and the directory that
  // relative paths are resolved against.
  using Factory = std::function<OracleSuite(const std::string& arg, const std::filesystem::path& base)>;

  OracleRegistry() {
    add("toy", [](const std::string& arg, const std::filesystem::path& base) {
      if (arg.empty()) return toy::make_suite(toy::parse_fixture(std::string(toy::kFixture)));
      std::filesystem::path p(arg);
      if (p.is_relative()) p = base / p;
      return toy::make_suite(toy::load_fixture(p.string()));
    });
  }

  void add(const std::string& backend, Factory factory) { factories_[backend] = std::move(factory); }

  OracleSuite resolve(const OracleIds& ids, const std::filesystem::path& base = ".") {
    std::vector<std::string> problems;
    auto get = [&](const std::string& role, const std::string& id) -> const OracleSuite* {
      try {
        return &suite_for(id, base);
      } catch (const std::exception& e) {
        problems.push_back("oracle." + role + " = " + id + ": " + e.what());
        return nullptr;
      }
    };
    OracleSuite out;
    if (auto s = get("victim", ids.victim)) out.victim = s->victim;
    if (auto s = get("mlm", ids.mlm)) out.mlm = s->mlm;
    if (auto s = get("embedder", ids.embedder)) out.embedder = s->embedder;
    if (auto s = get("paraphraser", ids.paraphraser)) out.paraphraser = s->paraphraser;
    if (auto s = get("lm", ids.lm)) out.lm = s->lm;
    if (auto s = get("grammar", ids.grammar)) out.grammar = s->grammar;
    if (auto s = get("metric_embedder", ids.metric_embedder))
      out.metric_embedder = s->metric_embedder ? s->metric_embedder : s->embedder;
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return out;
  }

 private:
  const OracleSuite& suite_for(const std::string& id, const std::filesystem::path& base) {
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
    const auto colon = id.find(':');
    const auto backend = id.substr(0, colon);
    const auto arg = colon == std::string::npos ? std::string() : id.substr(colon + 1);
    auto f = factories_.find(backend);
    if (f == factories_.end()) throw std::invalid_argument("unknown oracle backend '" + backend + "'");
    return cache_.emplace(id, f->second(arg, base)).first->second;
  }

  std::map<std::string, Factory> factories_;
  std::map<std::string, OracleSuite> cache_;
};

}  // namespace advtext::harness
