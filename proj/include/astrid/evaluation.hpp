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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "astrid/classifiers.hpp"
#include "astrid/dataset.hpp"
#include "astrid/error.hpp"
#include "astrid/parallel.hpp"
#include "astrid/permutation.hpp"
#include "astrid/rng.hpp"

namespace astrid {

/// Sample counts and seeding for the permutation trials. `threads` only
/// affects speed, never results.
struct TrialConfig {
  std::size_t R = 250;  // trials per confidence interval
  std::size_t N = 100;  // trials per expected accuracy
  double lower_quantile = 0.05;
  double upper_quantile = 0.95;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;

  void check() const {
    if (R < 2) throw Error(ErrorCode::kInvalidArgument, "R must be at least 2");
    if (N < 1) throw Error(ErrorCode::kInvalidArgument, "N must be at least 1");
    if (!(lower_quantile > 0.0 && lower_quantile < upper_quantile && upper_quantile < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "quantiles must satisfy 0 < lower < upper < 1");
    }
  }
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> samples;
};

/// Trial streams are keyed by these tags so that V, CI and p-value trials
/// for the same grouping never share random numbers.
inline constexpr std::string_view kExpectedAccuracyTag = "expected-accuracy";
inline constexpr std::string_view kConfidenceIntervalTag = "confidence-interval";
inline constexpr std::string_view kOjalaTag = "ojala-test2";

inline double accuracy(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth) {
  if (truth.empty()) throw Error(ErrorCode::kEmptyTestSet, "test set has no rows");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

/// Fraction of `test` rows whose predicted class equals the label.
inline double accuracy(const TrainedModel& model, const Dataset& test) {
  if (test.rows() == 0) throw Error(ErrorCode::kEmptyTestSet, "test set has no rows");
  return accuracy(model.predict(test), test.labels);
}

template <Trainer T>
double baseline_accuracy(const T& trainer, const Dataset& train, const Dataset& test) {
  return accuracy(trainer(train), test);
}

inline double baseline_accuracy(const ClassifierSpec& spec, const Dataset& train, const Dataset& test) {
  return baseline_accuracy(SpecTrainer{spec}, train, test);
}

/// Runs `count` trials: permute `train` under `grouping`, refit, score on
/// `test`. Trial i uses the stream (master_seed, purpose, grouping, i).
template <Trainer T>
std::vector<double> permuted_accuracies(const T& trainer, const Dataset& train, const Grouping& grouping,
                                        const Dataset& test, std::size_t count, std::string_view purpose,
                                        const TrialConfig& config) {
  check_grouping(train, grouping);
  if (test.rows() == 0) throw Error(ErrorCode::kEmptyTestSet, "test set has no rows");
  const std::string key = grouping.to_string();
  std::vector<double> out(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    try {
      auto rng = derive_stream(config.master_seed, purpose, key, i);
      const Dataset permuted = sample_permuted(train, grouping, rng);
      out[i] = accuracy(trainer(permuted), test);
    } catch (const Error& e) {
      throw Error(ErrorCode::kTrialFailed, "trial " + std::to_string(i) + " for grouping " + key + ": " + e.what());
    }
  });
  return out;
}

struct ExpectedAccuracy {
  double value = 0.0;
  double standard_error = 0.0;  // sample sd / sqrt(N); 0 when N == 1
  std::vector<double> samples;
};

template <Trainer T>
ExpectedAccuracy estimate_expected_accuracy(const T& trainer, const Dataset& train, const Grouping& grouping,
                                            const Dataset& test_v, const TrialConfig& config) {
  config.check();
  ExpectedAccuracy out;
  out.samples = permuted_accuracies(trainer, train, grouping, test_v, config.N, kExpectedAccuracyTag, config);
  // Centred on the first sample so that identical samples average exactly.
  const double n = static_cast<double>(out.samples.size());
  const double first = out.samples.front();
  double sum = 0.0;
  for (double a : out.samples) sum += a - first;
  out.value = first + sum / n;
  if (out.samples.size() > 1) {
    double ss = 0.0;
    for (double a : out.samples) ss += (a - out.value) * (a - out.value);
    out.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

inline ExpectedAccuracy estimate_expected_accuracy(const ClassifierSpec& spec, const Dataset& train,
                                                   const Grouping& grouping, const Dataset& test_v,
                                                   const TrialConfig& config) {
  return estimate_expected_accuracy(SpecTrainer{spec}, train, grouping, test_v, config);
}

/// Mean accuracy over N permuted-and-refitted trials.
template <Trainer T>
double expected_accuracy(const T& trainer, const Dataset& train, const Grouping& grouping, const Dataset& test_v,
                         const TrialConfig& config) {
  return estimate_expected_accuracy(trainer, train, grouping, test_v, config).value;
}

inline double expected_accuracy(const ClassifierSpec& spec, const Dataset& train, const Grouping& grouping,
                                const Dataset& test_v, const TrialConfig& config) {
  return expected_accuracy(SpecTrainer{spec}, train, grouping, test_v, config);
}

/// 1-based nearest rank ceil(q * R), clamped to [1, R]. The small slack
/// keeps products such as 0.95 * 100 from rounding up past an integer.
inline std::size_t nearest_rank(double q, std::size_t count) {
  const double exact = q * static_cast<double>(count);
  auto rank = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::clamp<std::size_t>(rank, 1, count);
}

/// Interval from the order statistics at the nearest ranks of the quantiles.
inline ConfidenceInterval nearest_rank_interval(std::vector<double> samples, double lower_q, double upper_q) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "no samples");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  ConfidenceInterval ci;
  ci.lower = sorted[nearest_rank(lower_q, sorted.size()) - 1];
  ci.upper = sorted[nearest_rank(upper_q, sorted.size()) - 1];
  ci.samples = std::move(samples);
  return ci;
}

template <Trainer T>
ConfidenceInterval confidence_interval(const T& trainer, const Dataset& train, const Grouping& grouping,
                                       const Dataset& test_ci, const TrialConfig& config) {
  config.check();
  return nearest_rank_interval(
      permuted_accuracies(trainer, train, grouping, test_ci, config.R, kConfidenceIntervalTag, config),
      config.lower_quantile, config.upper_quantile);
}

inline ConfidenceInterval confidence_interval(const ClassifierSpec& spec, const Dataset& train,
                                              const Grouping& grouping, const Dataset& test_ci,
                                              const TrialConfig& config) {
  return confidence_interval(SpecTrainer{spec}, train, grouping, test_ci, config);
}

/// True when the grouping is a valid factorisation: the CI reaches a0.
inline bool structure_test(double a0, const ConfidenceInterval& ci) { return ci.upper >= a0; }

struct OjalaTest {
  double p_value = 1.0;
  double baseline = 0.0;
  std::vector<double> samples;
};

/// Permutation test of "the classifier uses no attribute interactions":
/// R trials with every attribute permuted independently within class,
/// p = (1 + #{trial accuracy >= a0}) / (R + 1).
template <Trainer T>
OjalaTest ojala_test2(const T& trainer, const Dataset& train, const Dataset& test, const TrialConfig& config) {
  config.check();
  OjalaTest out;
  out.baseline = baseline_accuracy(trainer, train, test);
  out.samples = permuted_accuracies(trainer, train, Grouping::singletons(train.cols()), test, config.R, kOjalaTag,
                                    config);
  const auto at_least =
      std::count_if(out.samples.begin(), out.samples.end(), [&](double a) { return a >= out.baseline; });
  out.p_value = static_cast<double>(1 + at_least) / static_cast<double>(config.R + 1);
  return out;
}

inline OjalaTest ojala_test2(const ClassifierSpec& spec, const Dataset& train, const Dataset& test,
                             const TrialConfig& config) {
  return ojala_test2(SpecTrainer{spec}, train, test, config);
}

}  // namespace astrid
