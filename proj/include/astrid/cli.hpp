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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "astrid/classifiers.hpp"
#include "astrid/dataset.hpp"
#include "astrid/evaluation.hpp"
#include "astrid/ingest.hpp"
#include "astrid/permutation.hpp"
#include "astrid/report.hpp"
#include "astrid/search.hpp"

namespace astrid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInvalid = 3;

/// Errors caused by the user's input (files, flags, groupings) exit with 2;
/// everything else exits with 1.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError:
    case ErrorCode::kUnsupportedAttributeType:
    case ErrorCode::kUnknownClassColumn:
    case ErrorCode::kUnknownAttribute:
    case ErrorCode::kClassAttributeNotNominal:
    case ErrorCode::kEmptyResult:
    case ErrorCode::kClassTooSmall:
    case ErrorCode::kInvalidDataset:
    case ErrorCode::kParseError:
    case ErrorCode::kNotAPartition:
    case ErrorCode::kGroupingMismatch:
    case ErrorCode::kUnsupportedKind:
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

/// Input failure already phrased for the user.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string data;
  std::string class_name;
  std::string classifier = "rf";
  std::size_t R = 250;
  std::size_t N = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t trees = 100;
  std::size_t mtry = 0;
  bool no_bootstrap = false;
  std::size_t neighbours = 5;
  bool quiet = false;

  ClassifierSpec spec() const {
    ClassifierSpec s;
    s.kind = parse_classifier_kind(classifier);
    s.trees = trees;
    s.features_per_split = mtry;
    s.bootstrap = !no_bootstrap;
    s.neighbours = neighbours;
    s.train_seed = seed;
    s.check();
    return s;
  }

  TrialConfig config() const {
    TrialConfig c;
    c.R = R;
    c.N = N;
    c.master_seed = seed;
    c.threads = threads;
    c.check();
    return c;
  }
};

inline void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--data", o.data, "input dataset (.csv or .arff)")->required();
  cmd->add_option("--class", o.class_name, "name of the class attribute/column")->required();
  cmd->add_option("--classifier", o.classifier, "nb | tree | rf | knn")->capture_default_str();
  cmd->add_option("--R", o.R, "trials per confidence interval")->capture_default_str();
  cmd->add_option("--N", o.N, "trials per expected accuracy")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for the split, trials and classifier")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--trees", o.trees, "random forest: number of trees")->capture_default_str();
  cmd->add_option("--mtry", o.mtry, "random forest: attributes per split (0 = ceil(sqrt(m)))")
      ->capture_default_str();
  cmd->add_flag("--no-bootstrap", o.no_bootstrap, "random forest: grow every tree on all rows");
  cmd->add_option("--k", o.neighbours, "knn: number of neighbours")->capture_default_str();
  cmd->add_flag("--quiet", o.quiet, "suppress progress output");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Reads, preprocesses and validates the dataset named on the command line.
inline Dataset load_dataset(const CommonOptions& o) {
  const std::string text = read_file(o.data);
  auto ends_with = [&](std::string_view suffix) {
    return o.data.size() >= suffix.size() &&
           detail::lowercase(o.data.substr(o.data.size() - suffix.size())) == suffix;
  };
  Dataset raw;
  try {
    if (ends_with(".arff")) {
      raw = to_dataset(parse_arff(text), o.class_name);
    } else if (ends_with(".csv")) {
      raw = parse_csv(text, o.class_name);
    } else {
      throw UsageError(o.data + ": unknown file type (expected .csv or .arff)");
    }
  } catch (const Error& e) {
    throw UsageError(o.data + ": " + e.what());
  }
  Dataset data = preprocess(raw);
  if (const auto violations = validate(data); !violations.empty()) {
    std::string msg = o.data + ": " + violations.front().message;
    if (violations.front().row) msg += " at row " + std::to_string(*violations.front().row + 1);
    throw UsageError(msg);
  }
  return data;
}

inline int cmd_run(const CommonOptions& o, const std::string& out_path, bool full_ci, std::ostream& out,
                   std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const ClassifierSpec spec = o.spec();
  const TrialConfig config = o.config();
  const Dataset data = load_dataset(o);
  const DataSplit split = stratified_split(data, o.seed);
  ProgressFn progress;
  if (!o.quiet) progress = [&err](std::string_view msg) { err << "  " << msg << "\n"; };
  const AstridResult result = run_astrid(spec, split, config, full_ci, progress);
  RunReport report = make_report(o.data, data, spec, config, full_ci, result);
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw UsageError(out_path + ": cannot write report");
    f << to_json(report).dump(2) << "\n";
  }
  out << render_text(report);
  out << "wall clock: " << detail::fixed3(report.wall_clock_seconds) << " s\n";
  return kExitOk;
}

inline int cmd_test_grouping(const CommonOptions& o, const std::string& grouping_text, std::ostream& out) {
  const ClassifierSpec spec = o.spec();
  const TrialConfig config = o.config();
  const Dataset data = load_dataset(o);
  const Grouping grouping = parse_grouping(grouping_text, data.cols());
  const DataSplit split = stratified_split(data, o.seed);
  const double a0 = baseline_accuracy(spec, split.train, split.test_ci);
  const ConfidenceInterval ci = confidence_interval(spec, split.train, grouping, split.test_ci, config);
  const bool valid = structure_test(a0, ci);
  out << "grouping: " << grouping.to_string() << "\n";
  out << "a0 = " << detail::fixed3(a0) << "\n";
  out << "CI = [" << detail::fixed3(ci.lower) << ", " << detail::fixed3(ci.upper) << "]\n";
  out << (valid ? "VALID" : "INVALID") << "\n";
  return valid ? kExitOk : kExitInvalid;
}

inline int cmd_synth(std::size_t n_per_class, std::uint64_t seed, const std::string& model,
                     const std::string& out_path, std::ostream& out) {
  Dataset d;
  if (model == "xor") {
    d = generate_synthetic(n_per_class, seed);
  } else if (model == "independent") {
    d = generate_interaction_free(n_per_class, seed);
  } else {
    throw UsageError("unknown synthetic model '" + model + "' (expected xor or independent)");
  }
  const std::string csv = write_csv(d, "class");
  if (out_path.empty()) {
    out << csv;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw UsageError(out_path + ": cannot write file");
    f << csv;
  }
  return kExitOk;
}

inline int cmd_ogtest(const CommonOptions& o, std::ostream& out) {
  const ClassifierSpec spec = o.spec();
  const TrialConfig config = o.config();
  const Dataset data = load_dataset(o);
  const DataSplit split = stratified_split(data, o.seed);
  const OjalaTest t = ojala_test2(spec, split.train, split.test_ci, config);
  out << "a0 = " << detail::fixed3(t.baseline) << "\n";
  out << "p_OG = " << detail::fixed3(t.p_value) << "\n";
  return kExitOk;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Find the attribute groups a classifier uses jointly"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_out;
  bool full_ci = false;
  auto* run = app.add_subcommand("run", "greedy search for the largest valid grouping");
  add_common(run, run_opts);
  run->add_option("--out", run_out, "write the JSON report here");
  run->add_flag("--full-ci", full_ci, "compute the confidence interval of every cardinality");

  CommonOptions test_opts;
  std::string grouping_text;
  auto* test = app.add_subcommand("test-grouping", "test one grouping; exit 0 if valid, 3 if not");
  add_common(test, test_opts);
  test->add_option("--grouping", grouping_text, "grouping such as \"1,2|3|4\" (1-based)")->required();

  std::size_t n_per_class = 500;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  std::string synth_model = "xor";
  auto* synth = app.add_subcommand("synth", "write the synthetic dataset as CSV");
  synth->add_option("--n-per-class", n_per_class, "rows per class")->capture_default_str()->check(
      CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output path (default: stdout)");
  synth->add_option("--model", synth_model, "xor | independent")->capture_default_str();

  CommonOptions og_opts;
  auto* og = app.add_subcommand("ogtest", "p-value of the no-interactions permutation test");
  add_common(og, og_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opts, run_out, full_ci, out, err);
    if (*test) return cmd_test_grouping(test_opts, grouping_text, out);
    if (*synth) return cmd_synth(n_per_class, synth_seed, synth_model, synth_out, out);
    if (*og) return cmd_ogtest(og_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace astrid::cli
