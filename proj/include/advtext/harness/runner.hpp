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

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "advtext/harness/config.hpp"
#include "advtext/harness/dataset.hpp"
#include "advtext/harness/registry.hpp"
#include "advtext/harness/report.hpp"
#include "advtext/metrics.hpp"
#include "advtext/perturb.hpp"
#include "advtext/toy_fixture.hpp"

namespace advtext::harness {

inline std::vector<LabeledExample> prepare_examples(const std::vector<DatasetRecord>& records,
                                                    const RunConfig& config) {
  std::vector<LabeledExample> out;
  for (std::size_t i : sample_indices(records.size(), config.sample_limit, config.seed))
    out.push_back(to_example(records[i], config.attack_field));
  return out;
}

// Attacks every example, scores every result and aggregates. An aggregate
// with no admitted sample keeps its NaN sentinels.
inline RunOutcome run_mode(const std::vector<LabeledExample>& examples, const RunConfig& config,
                           const OracleSuite& oracles) {
  RunOutcome run;
  run.mode = to_string(config.attack.selection.mode);
  run.results = run_batch(examples, oracles, config.attack, config.seed, config.workers);
  for (const auto& r : run.results) run.metrics.push_back(compute_sample_metrics(r, oracles));
  try {
    run.aggregate = aggregate(run.results, run.metrics);
  } catch (const NoAdmittedSamples&) {
    run.aggregate = AggregateReport{};
    run.aggregate.sample_count = run.results.size();
    run.aggregate.skipped_count = run.results.size();
  }
  run.aggregate.config = echo(config);
  return run;
}

// `attack run`: 0 on completion (per-sample failures included), 2 on
// configuration or input errors.
inline int run_command(const std::filesystem::path& config_path, const std::filesystem::path& dataset_path,
                       const std::string& schema_name, const std::filesystem::path& out_dir,
                       std::ostream& log, std::ostream& err) {
  try {
    const RunConfig config = load_config(config_path.string());
    const Schema schema = parse_schema(schema_name);
    if (schema == Schema::pair && config.attack_field == AttackField::text)
      throw ConfigError({"attack_field: use text_a or text_b for pair datasets"});
    OracleRegistry registry;
    const OracleSuite oracles = registry.resolve(config.oracles, config_path.parent_path());
    const LoadedDataset data = load_dataset(dataset_path.string(), schema);
    for (const auto& e : data.errors) err << "dataset line " << e.line << ": " << e.message << "\n";

    const auto examples = prepare_examples(data.records, config);
    std::vector<RunOutcome> runs{run_mode(examples, config, oracles)};
    json errors = json::array();
    for (const auto& e : data.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
    emit_report(runs, out_dir, {{"dataset_errors", errors}, {"schema", schema_name}});
    log << render_table({{runs[0].mode, runs[0].aggregate}});
    return 0;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

// Runs both modes over the bundled toy corpus and writes the bundle plus a
// copy of the inputs, so `attack run` can replay it.
inline std::vector<RunOutcome> toy_demo(const std::filesystem::path& out_dir) {
  RunConfig config = parse_config(std::string(toy::kConfig));
  const auto data = parse_dataset(std::string(toy::kCorpus), Schema::single);
  OracleRegistry registry;
  const OracleSuite oracles = registry.resolve(config.oracles);
  const auto examples = prepare_examples(data.records, config);

  std::vector<RunOutcome> runs;
  for (AttackMode mode : {AttackMode::clare, AttackMode::sassp}) {
    config.attack.selection.mode = mode;
    runs.push_back(run_mode(examples, config, oracles));
  }
  emit_report(runs, out_dir, {{"dataset_errors", json::array()}, {"schema", "single"}});
  const auto inputs = out_dir / "inputs";
  std::filesystem::create_directories(inputs);
  detail::write_file(inputs / "toy.fixture", std::string(toy::kFixture));
  detail::write_file(inputs / "toy_corpus.jsonl", std::string(toy::kCorpus));
  detail::write_file(inputs / "toy.cfg", std::string(toy::kConfig));
  return runs;
}

}  // namespace advtext::harness
