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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "advtext/harness/runner.hpp"

int main(int argc, char** argv) {
  namespace h = advtext::harness;
  CLI::App app{"Word-substitution adversarial attacks against text classifiers"};
  app.require_subcommand(1);

  std::string config, dataset, schema = "single", out, in;

  auto* run = app.add_subcommand("run", "Attack a dataset and write a report bundle");
  run->add_option("--config", config, "Run configuration file")->required();
  run->add_option("--dataset", dataset, "Line-delimited JSON dataset")->required();
  run->add_option("--schema", schema, "Record schema")->check(CLI::IsMember({"single", "pair"}));
  run->add_option("--out", out, "Output directory")->required();

  auto* demo = app.add_subcommand("toy-demo", "Run both modes on the bundled toy corpus");
  demo->add_option("--out", out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Print the table of an existing report bundle");
  report->add_option("--in", in, "Report bundle directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) return h::run_command(config, dataset, schema, out, std::cout, std::cerr);

  try {
    if (*demo) {
      const auto runs = h::toy_demo(out);
      std::vector<h::TableRow> rows;
      for (const auto& r : runs) rows.push_back({r.mode, r.aggregate});
      std::cout << h::render_table(rows);
      return 0;
    }
    if (*report) {
      std::cout << h::render_table(h::table_rows_from_json(h::read_report(in)));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
