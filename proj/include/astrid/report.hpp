/*
 * Copyright 2026 The astrid-cpp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "astrid/classifiers.hpp"
#include "astrid/dataset.hpp"
#include "astrid/evaluation.hpp"
#include "astrid/search.hpp"

namespace astrid {

struct ReportRow {
  std::size_t k = 0;
  std::string grouping;
  double v = 0.0;
  double v_standard_error = 0.0;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
  bool valid = false;
};

/// Everything a run produced, plus what is needed to reproduce it.
struct RunReport {
  std::string source;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::string> attribute_names;
  std::vector<std::string> class_names;
  double major_class_proportion = 0.0;

  ClassifierSpec classifier;
  std::size_t R = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double lower_quantile = 0.05;
  double upper_quantile = 0.95;
  bool full_ci = false;

  double baseline = 0.0;
  std::vector<ReportRow> rows;
  std::string selected;

  // Rendered in the text output only; the JSON report must be reproducible.
  double wall_clock_seconds = 0.0;
};

inline RunReport make_report(std::string source, const Dataset& data, const ClassifierSpec& spec,
                             const TrialConfig& config, bool full_ci, const AstridResult& result) {
  RunReport r;
  r.source = std::move(source);
  r.n = data.rows();
  r.m = data.cols();
  r.attribute_names = data.attribute_names;
  r.class_names = data.class_names;
  r.major_class_proportion = data.major_class_proportion();
  r.classifier = spec;
  r.R = config.R;
  r.N = config.N;
  r.seed = config.master_seed;
  r.lower_quantile = config.lower_quantile;
  r.upper_quantile = config.upper_quantile;
  r.full_ci = full_ci;
  r.baseline = result.baseline;
  for (std::size_t i = 0; i < result.trace.entries.size(); ++i) {
    const auto& e = result.trace.entries[i];
    ReportRow row;
    row.k = i + 1;
    row.grouping = e.grouping.to_string();
    row.v = e.v;
    row.v_standard_error = e.v_standard_error;
    if (e.ci) {
      row.ci_lower = e.ci->lower;
      row.ci_upper = e.ci->upper;
    }
    row.valid = e.valid;
    r.rows.push_back(std::move(row));
  }
  r.selected = result.selected.to_string();
  return r;
}

inline nlohmann::ordered_json to_json(const RunReport& r) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"k", row.k},
                    {"grouping", row.grouping},
                    {"v", row.v},
                    {"v_standard_error", row.v_standard_error},
                    {"ci_lower", row.ci_lower ? ordered_json(*row.ci_lower) : ordered_json(nullptr)},
                    {"ci_upper", row.ci_upper ? ordered_json(*row.ci_upper) : ordered_json(nullptr)},
                    {"valid", row.valid}});
  }
  return {
      {"dataset",
       {{"source", r.source},
        {"n", r.n},
        {"m", r.m},
        {"classes", r.class_names.size()},
        {"class_names", r.class_names},
        {"attribute_names", r.attribute_names},
        {"major_class_proportion", r.major_class_proportion}}},
      {"classifier",
       {{"kind", std::string(to_string(r.classifier.kind))},
        {"trees", r.classifier.trees},
        {"features_per_split", r.classifier.features_per_split},
        {"bootstrap", r.classifier.bootstrap},
        {"neighbours", r.classifier.neighbours},
        {"train_seed", r.classifier.train_seed}}},
      {"config",
       {{"R", r.R},
        {"N", r.N},
        {"seed", r.seed},
        {"lower_quantile", r.lower_quantile},
        {"upper_quantile", r.upper_quantile},
        {"full_ci", r.full_ci}}},
      {"baseline", r.baseline},
      {"rows", rows},
      {"selected", r.selected},
  };
}

namespace detail {

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Table with one row per cardinality: k, V, CI, validity asterisk, and the
/// group letter of each attribute. Numbers are rounded to 3 decimals.
inline std::string render_text(const RunReport& r) {
  using detail::fixed3;
  using detail::pad;
  std::string out;
  out += "dataset: " + r.source + "  n=" + std::to_string(r.n) + " m=" + std::to_string(r.m) +
         " classes=" + std::to_string(r.class_names.size()) + " MCP=" + detail::fixed3(r.major_class_proportion) + "\n";
  out += "classifier: " + std::string(to_string(r.classifier.kind)) + "  R=" + std::to_string(r.R) +
         " N=" + std::to_string(r.N) + " seed=" + std::to_string(r.seed) + "\n";
  out += "a0 = " + fixed3(r.baseline) + "\n\n";

  std::vector<std::size_t> widths(r.m, 1);
  for (std::size_t j = 0; j < r.m; ++j) widths[j] = std::max<std::size_t>(r.attribute_names[j].size(), 2);
  std::string header = pad("k", 4) + pad("V", 7) + pad("CI", 17) + pad("", 2);
  for (std::size_t j = 0; j < r.m; ++j) header += pad(r.attribute_names[j], widths[j] + 1);
  while (!header.empty() && header.back() == ' ') header.pop_back();
  out += header + "\n";
  for (const auto& row : r.rows) {
    std::string line = pad(std::to_string(row.k), 4) + pad(fixed3(row.v), 7);
    line += pad(row.ci_lower ? "[" + fixed3(*row.ci_lower) + ", " + fixed3(*row.ci_upper) + "]" : "-", 17);
    line += pad(row.valid ? "*" : "", 2);
    const auto letters = parse_grouping(row.grouping, r.m).letters();
    for (std::size_t j = 0; j < r.m; ++j) line += pad(letters[j], widths[j] + 1);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  out += "\nselected: " + r.selected + "\n";
  return out;
}

}  // namespace astrid
