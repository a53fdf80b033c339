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

// Report bundle: report.json (every sample, aggregate and config echo per
// run), report.md (one table row per run) and samples/<mode>/NNNN.json.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/metrics.hpp"
#include "advtext/perturb.hpp"
#include "json.hpp"

namespace advtext::harness {

using nlohmann::json;

// One attack mode applied to one dataset.
struct RunOutcome {
  std::string mode;
  std::vector<AttackResult> results;
  std::vector<SampleMetrics> metrics;
  AggregateReport aggregate;
};

namespace detail {

inline json real_or_null(double d) { return std::isnan(d) ? json(nullptr) : json(d); }

inline double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

template <typename T>
json optional_json(const std::optional<T>& o) {
  return o ? json(*o) : json(nullptr);
}

}  // namespace detail

inline json to_json(const AggregateReport& r) {
  return {
      {"asr", detail::real_or_null(r.asr)},
      {"mean_per", detail::real_or_null(r.mean_per)},
      {"mean_wmr", detail::real_or_null(r.mean_wmr)},
      {"mean_sye", detail::real_or_null(r.mean_sye)},
      {"mean_ses", detail::real_or_null(r.mean_ses)},
      {"sample_count", r.sample_count},
      {"skipped_count", r.skipped_count},
      {"admitted_count", r.admitted_count},
      {"success_count", r.success_count},
      {"per_excluded", r.per_excluded},
      {"sye_excluded", r.sye_excluded},
      {"ses_excluded", r.ses_excluded},
      {"config", r.config},
  };
}

inline AggregateReport aggregate_from_json(const json& j) {
  AggregateReport r;
  r.asr = detail::real_from(j.at("asr"));
  r.mean_per = detail::real_from(j.at("mean_per"));
  r.mean_wmr = detail::real_from(j.at("mean_wmr"));
  r.mean_sye = detail::real_from(j.at("mean_sye"));
  r.mean_ses = detail::real_from(j.at("mean_ses"));
  r.sample_count = j.at("sample_count").get<std::size_t>();
  r.skipped_count = j.at("skipped_count").get<std::size_t>();
  r.admitted_count = j.at("admitted_count").get<std::size_t>();
  r.success_count = j.at("success_count").get<std::size_t>();
  r.per_excluded = j.at("per_excluded").get<std::size_t>();
  r.sye_excluded = j.at("sye_excluded").get<std::size_t>();
  r.ses_excluded = j.at("ses_excluded").get<std::size_t>();
  r.config = j.at("config").get<std::map<std::string, std::string>>();
  return r;
}

inline json to_json(const AttackResult& r, const SampleMetrics& m, std::size_t index) {
  json edits = json::array();
  for (const auto& e : r.edits) edits.push_back({{"index", e.index}, {"from", e.original_word}, {"to", e.new_word}});
  json j = {
      {"index", index},
      {"status", to_string(r.status)},
      {"reason", r.reason},
      {"success", r.success},
      {"gold_label", r.original.gold_label},
      {"final_label", r.final_label},
      {"original", detokenize(r.original.attackable())},
      {"adversarial", detokenize(r.adversarial_text)},
      {"edits", edits},
      {"queries_used", r.queries_used},
      {"sim_score", detail::real_or_null(r.sim_score)},
      {"para_score", detail::real_or_null(r.para_score)},
      {"gates_passed", r.gates_passed},
      {"sample_seed", r.sample_seed},
      {"metrics",
       {{"wmr", m.wmr},
        {"perplexity", detail::optional_json(m.perplexity)},
        {"sye", detail::optional_json(m.sye)},
        {"ses", detail::optional_json(m.ses)}}},
  };
  if (r.original.is_pair()) {
    j["text_a"] = detokenize(r.original.text_a);
    j["text_b"] = detokenize(*r.original.text_b);
    j["attacked_field"] = r.original.attacked_segment() == Segment::b ? "text_b" : "text_a";
  }
  return j;
}

inline std::string mode_label(const std::string& mode) {
  std::string out = mode;
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

namespace detail {

inline std::string cell(double d, int decimals) {
  if (std::isnan(d)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, d);
  return buf;
}

}  // namespace detail

struct TableRow {
  std::string mode;
  AggregateReport aggregate;
};

// Model | ASR | PER | WMR | SYE | SES, ASR/PER/WMR to one decimal and
// SYE/SES to two.
inline std::string render_table(const std::vector<TableRow>& rows) {
  std::ostringstream out;
  out << "| Model | ASR | PER | WMR | SYE | SES |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    const auto& a = row.aggregate;
    out << "| " << mode_label(row.mode) << " | " << detail::cell(a.asr, 1) << " | "
        << detail::cell(a.mean_per, 1) << " | " << detail::cell(a.mean_wmr, 1) << " | "
        << detail::cell(a.mean_sye, 2) << " | " << detail::cell(a.mean_ses, 2) << " |\n";
  }
  out << "\n";
  for (const auto& row : rows) {
    const auto& a = row.aggregate;
    if (a.sample_count > 0 && a.skipped_count == a.sample_count)
      out << "**" << mode_label(row.mode) << ": all " << a.sample_count << " samples skipped.**\n";
    out << mode_label(row.mode) << ": " << a.sample_count << " samples, " << a.admitted_count
        << " admitted, " << a.success_count << " successful, " << a.skipped_count << " skipped";
    if (a.per_excluded + a.sye_excluded + a.ses_excluded > 0)
      out << " (metric exclusions: PER " << a.per_excluded << ", SYE " << a.sye_excluded << ", SES "
          << a.ses_excluded << ")";
    out << ".\n";
  }
  return out.str();
}

inline json to_json(const std::vector<RunOutcome>& runs, const json& extra = json::object()) {
  json j = extra;
  j["runs"] = json::array();
  for (const auto& run : runs) {
    json samples = json::array();
    for (std::size_t i = 0; i < run.results.size(); ++i)
      samples.push_back(to_json(run.results[i], run.metrics[i], i));
    j["runs"].push_back({{"mode", run.mode}, {"aggregate", to_json(run.aggregate)}, {"samples", samples}});
  }
  return j;
}

inline std::vector<TableRow> table_rows_from_json(const json& report) {
  std::vector<TableRow> rows;
  for (const auto& run : report.at("runs"))
    rows.push_back({run.at("mode").get<std::string>(), aggregate_from_json(run.at("aggregate"))});
  return rows;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace detail

inline void emit_report(const std::vector<RunOutcome>& runs, const std::filesystem::path& dir,
                        const json& extra = json::object()) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const json report = to_json(runs, extra);
  detail::write_file(dir / "report.json", report.dump(2) + "\n");

  std::vector<TableRow> rows;
  for (const auto& run : runs) rows.push_back({run.mode, run.aggregate});
  detail::write_file(dir / "report.md", render_table(rows));

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto sdir = dir / "samples" / runs[r].mode;
    fs::create_directories(sdir);
    for (const auto& sample : report["runs"][r]["samples"]) {
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.json", sample["index"].get<std::size_t>());
      detail::write_file(sdir / name, sample.dump(2) + "\n");
    }
  }
}

inline json read_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "report.json");
  if (!in) throw std::runtime_error("cannot open " + (dir / "report.json").string());
  return json::parse(in);
}

}  // namespace advtext::harness
