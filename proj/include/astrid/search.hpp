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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "astrid/classifiers.hpp"
#include "astrid/dataset.hpp"
#include "astrid/evaluation.hpp"
#include "astrid/permutation.hpp"

namespace astrid {

struct TraceEntry {
  Grouping grouping;
  double v = 0.0;
  double v_standard_error = 0.0;
  std::optional<ConfidenceInterval> ci;  // only for entries whose CI was computed
  bool valid = false;
};

/// entries[k - 1] holds the grouping of cardinality k.
struct SearchTrace {
  std::vector<TraceEntry> entries;
};

struct AstridResult {
  double baseline = 0.0;  // a0 on test_ci
  SearchTrace trace;
  Grouping selected;
};

using ProgressFn = std::function<void(std::string_view)>;

/// Top-down greedy sequence. Starts from one group holding every attribute;
/// each step tries extracting every attribute that sits in a group of size
/// >= 2 into its own group and keeps the move with the highest expected
/// accuracy on test_v (ties: smallest attribute index).
template <Trainer T>
SearchTrace greedy_sequence(const T& trainer, const DataSplit& split, const TrialConfig& config,
                            const ProgressFn& progress = {}) {
  config.check();
  const std::size_t m = split.train.cols();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "dataset has no attributes");
  SearchTrace trace;

  Grouping current = Grouping::single_group(m);
  auto first = estimate_expected_accuracy(trainer, split.train, current, split.test_v, config);
  trace.entries.push_back({current, first.value, first.standard_error, std::nullopt, false});
  if (progress) progress("k=1 V=" + std::to_string(first.value));

  for (std::size_t k = 2; k <= m; ++k) {
    std::optional<TraceEntry> best;
    for (std::size_t a = 0; a < m; ++a) {
      if (current.groups()[current.group_of(a)].size() < 2) continue;
      Grouping candidate = split_out(current, a);
      auto v = estimate_expected_accuracy(trainer, split.train, candidate, split.test_v, config);
      if (progress) progress("k=" + std::to_string(k) + " " + candidate.to_string() + " V=" + std::to_string(v.value));
      if (!best || v.value > best->v) {
        best = TraceEntry{std::move(candidate), v.value, v.standard_error, std::nullopt, false};
      }
    }
    current = best->grouping;
    trace.entries.push_back(std::move(*best));
  }
  return trace;
}

inline SearchTrace greedy_sequence(const ClassifierSpec& spec, const DataSplit& split, const TrialConfig& config,
                                   const ProgressFn& progress = {}) {
  return greedy_sequence(SpecTrainer{spec}, split, config, progress);
}

/// Measures a0 on test_ci, then confidence intervals from k = m downward,
/// stopping at the first valid entry unless `full_ci` is set. The selected
/// grouping is the valid entry of largest k; if none is valid the k = 1
/// grouping is returned.
template <Trainer T>
AstridResult select(const T& trainer, const DataSplit& split, SearchTrace trace, const TrialConfig& config,
                    bool full_ci = false, const ProgressFn& progress = {}) {
  config.check();
  AstridResult result;
  result.baseline = baseline_accuracy(trainer, split.train, split.test_ci);
  std::optional<std::size_t> chosen;
  for (std::size_t idx = trace.entries.size(); idx-- > 0;) {
    auto& entry = trace.entries[idx];
    entry.ci = confidence_interval(trainer, split.train, entry.grouping, split.test_ci, config);
    entry.valid = structure_test(result.baseline, *entry.ci);
    if (progress) {
      progress("k=" + std::to_string(idx + 1) + " CI=[" + std::to_string(entry.ci->lower) + ", " +
               std::to_string(entry.ci->upper) + "]" + (entry.valid ? " valid" : ""));
    }
    if (entry.valid && !chosen) {
      chosen = idx;
      if (!full_ci) break;
    }
  }
  result.selected = trace.entries[chosen.value_or(0)].grouping;
  result.trace = std::move(trace);
  return result;
}

inline AstridResult select(const ClassifierSpec& spec, const DataSplit& split, SearchTrace trace,
                           const TrialConfig& config, bool full_ci = false, const ProgressFn& progress = {}) {
  return select(SpecTrainer{spec}, split, std::move(trace), config, full_ci, progress);
}

/// greedy_sequence followed by select.
template <Trainer T>
AstridResult run_astrid(const T& trainer, const DataSplit& split, const TrialConfig& config, bool full_ci = false,
                        const ProgressFn& progress = {}) {
  return select(trainer, split, greedy_sequence(trainer, split, config, progress), config, full_ci, progress);
}

inline AstridResult run_astrid(const ClassifierSpec& spec, const DataSplit& split, const TrialConfig& config,
                               bool full_ci = false, const ProgressFn& progress = {}) {
  return run_astrid(SpecTrainer{spec}, split, config, full_ci, progress);
}

}  // namespace astrid
