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

// Line-delimited JSON datasets. Single-text records carry "text", pair
// records carry "text_a" and "text_b"; both carry an integer "label".

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "advtext/core.hpp"
#include "advtext/harness/config.hpp"
#include "json.hpp"

namespace advtext::harness {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FileNotFound : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class AllLinesMalformed : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

enum class Schema { single, pair };

inline Schema parse_schema(const std::string& s) {
  if (s == "single") return Schema::single;
  if (s == "pair") return Schema::pair;
  throw std::invalid_argument("schema must be single or pair, got '" + s + "'");
}

struct DatasetRecord {
  std::string text_a;  // "text" for single-text records
  std::optional<std::string> text_b;
  int label = 0;
};

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct LoadedDataset {
  std::vector<DatasetRecord> records;
  std::vector<LineError> errors;
};

namespace detail {

inline std::string required_text(const nlohmann::json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw std::invalid_argument(std::string("missing \"") + field + "\"");
  if (!it->is_string()) throw std::invalid_argument(std::string("\"") + field + "\" is not a string");
  auto s = it->get<std::string>();
  if (s.find_first_not_of(" \t\r\n") == std::string::npos)
    throw std::invalid_argument(std::string("\"") + field + "\" is empty");
  return s;
}

}  // namespace detail

inline LoadedDataset parse_dataset(const std::string& content, Schema schema) {
  LoadedDataset out;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record is not an object");
      DatasetRecord r;
      if (schema == Schema::single) {
        r.text_a = detail::required_text(j, "text");
      } else {
        r.text_a = detail::required_text(j, "text_a");
        r.text_b = detail::required_text(j, "text_b");
      }
      auto lab = j.find("label");
      if (lab == j.end()) throw std::invalid_argument("missing \"label\"");
      if (!lab->is_number_integer()) throw std::invalid_argument("\"label\" is not an integer");
      const auto v = lab->get<std::int64_t>();
      if (v < 0 || v > std::numeric_limits<int>::max())
        throw std::invalid_argument("\"label\" out of range");
      r.label = static_cast<int>(v);
      out.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  if (out.records.empty() && !out.errors.empty())
    throw AllLinesMalformed("all " + std::to_string(out.errors.size()) + " lines are malformed");
  return out;
}

inline LoadedDataset load_dataset(const std::string& path, Schema schema) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("dataset not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), schema);
}

inline LabeledExample to_example(const DatasetRecord& r, AttackField field) {
  LabeledExample e;
  e.text_a = tokenize(r.text_a);
  if (r.text_b) e.text_b = tokenize(*r.text_b);
  e.gold_label = r.label;
  e.target = field == AttackField::text_b ? Segment::b : Segment::a;
  return e;
}

// Seeded subset of `limit` indices in ascending order; every index when
// limit is 0 or not smaller than n.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t limit, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (limit == 0 || limit >= n) return idx;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng() % (i + 1)]);
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace advtext::harness
