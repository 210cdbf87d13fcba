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

#include "astrid/evaluation.hpp"

#include <gtest/gtest.h>

#include <random>

#include "astrid/ingest.hpp"

namespace astrid {
namespace {

ClassifierSpec small_forest(std::uint64_t seed = 1) {
  ClassifierSpec s;
  s.kind = ClassifierKind::kRandomForest;
  s.trees = 10;
  s.train_seed = seed;
  return s;
}

ClassifierSpec naive_bayes() {
  ClassifierSpec s;
  s.kind = ClassifierKind::kNaiveBayes;
  return s;
}

TrialConfig small_config(std::uint64_t seed = 7) {
  TrialConfig c;
  c.R = 20;
  c.N = 10;
  c.master_seed = seed;
  return c;
}

DataSplit small_split(std::uint64_t seed = 3) { return stratified_split(generate_synthetic(40, seed), seed); }

TEST(AccuracyTest, Examples) {
  EXPECT_EQ(accuracy({0, 1, 1, 0}, {0, 1, 0, 0}), 0.75);
  EXPECT_EQ(accuracy({2, 2}, {2, 2}), 1.0);
  try {
    accuracy(std::vector<std::size_t>{}, std::vector<std::size_t>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTestSet);
  }
  const DataSplit s = small_split();
  const TrainedModel model = train(naive_bayes(), s.train);
  EXPECT_THROW(accuracy(model, s.train.empty_like()), Error);
}

TEST(NearestRankTest, Examples) {
  const auto ci = nearest_rank_interval({0.9, 0.6, 0.8, 0.7}, 0.05, 0.95);
  EXPECT_EQ(ci.lower, 0.6);
  EXPECT_EQ(ci.upper, 0.9);
  EXPECT_EQ(nearest_rank(0.05, 100), 5u);
  EXPECT_EQ(nearest_rank(0.95, 100), 95u);
  EXPECT_EQ(nearest_rank(0.05, 250), 13u);
  EXPECT_EQ(nearest_rank(0.95, 250), 238u);
  EXPECT_EQ(nearest_rank(0.01, 10), 1u);
  EXPECT_EQ(nearest_rank(0.99, 10), 10u);
}

TEST(NearestRankTest, BoundsAreSampleValuesAndOrdered) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> xs(2 + gen() % 300);
    for (auto& x : xs) x = static_cast<double>(gen() % 50) / 50.0;
    const auto ci = nearest_rank_interval(xs, 0.05, 0.95);
    ASSERT_LE(ci.lower, ci.upper);
    ASSERT_NE(std::find(xs.begin(), xs.end(), ci.lower), xs.end());
    ASSERT_NE(std::find(xs.begin(), xs.end(), ci.upper), xs.end());
    const auto below = std::count_if(xs.begin(), xs.end(), [&](double x) { return x < ci.lower; });
    ASSERT_LT(static_cast<double>(below), 0.05 * static_cast<double>(xs.size()) + 1e-9);
  }
}

TEST(StructureTestTest, Boundaries) {
  EXPECT_TRUE(structure_test(0.908, {0.896, 0.920, {}}));
  EXPECT_FALSE(structure_test(0.908, {0.696, 0.784, {}}));
  EXPECT_TRUE(structure_test(0.8, {0.7, 0.8, {}}));
}

TEST(ExpectedAccuracyTest, SingleTrialEqualsOnePermutedRun) {
  const DataSplit s = small_split();
  TrialConfig c = small_config();
  c.N = 1;
  const Grouping g = Grouping::singletons(4);
  const auto v = estimate_expected_accuracy(small_forest(), s.train, g, s.test_v, c);
  auto rng = derive_stream(c.master_seed, kExpectedAccuracyTag, g.to_string(), 0);
  const Dataset permuted = sample_permuted(s.train, g, rng);
  EXPECT_EQ(v.value, accuracy(train(small_forest(), permuted), s.test_v));
  EXPECT_EQ(v.standard_error, 0.0);
}

TEST(ExpectedAccuracyTest, SingleGroupEqualsBaseline) {
  // Permuting whole rows within a class leaves every training-order
  // independent classifier unchanged.
  const DataSplit s = small_split();
  for (const ClassifierSpec& spec : {naive_bayes(), small_forest()}) {
    const auto v = estimate_expected_accuracy(spec, s.train, Grouping::single_group(4), s.test_v, small_config());
    EXPECT_EQ(v.value, baseline_accuracy(spec, s.train, s.test_v));
    EXPECT_EQ(v.standard_error, 0.0);
    const auto ci = confidence_interval(spec, s.train, Grouping::single_group(4), s.test_ci, small_config());
    const double a0 = baseline_accuracy(spec, s.train, s.test_ci);
    EXPECT_EQ(ci.lower, a0);
    EXPECT_EQ(ci.upper, a0);
  }
}

TEST(ExpectedAccuracyTest, NaiveBayesIsConstantAcrossGroupings) {
  const DataSplit s = small_split(5);
  const double a0 = baseline_accuracy(naive_bayes(), s.train, s.test_ci);
  for (const char* text : {"1|2|3|4", "1,2|3|4", "1,3|2,4"}) {
    const auto ci = confidence_interval(naive_bayes(), s.train, parse_grouping(text, 4), s.test_ci, small_config());
    EXPECT_EQ(ci.lower, a0) << text;
    EXPECT_EQ(ci.upper, a0) << text;
  }
}

TEST(ExpectedAccuracyTest, DeterministicAndThreadCountIndependent) {
  const DataSplit s = small_split();
  const Grouping g = parse_grouping("1,2|3|4", 4);
  TrialConfig one = small_config();
  TrialConfig four = small_config();
  four.threads = 4;
  const auto a = estimate_expected_accuracy(small_forest(), s.train, g, s.test_v, one);
  const auto b = estimate_expected_accuracy(small_forest(), s.train, g, s.test_v, four);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.value, b.value);
  const auto c = confidence_interval(small_forest(), s.train, g, s.test_ci, one);
  const auto d = confidence_interval(small_forest(), s.train, g, s.test_ci, four);
  EXPECT_EQ(c.samples, d.samples);
  TrialConfig other = small_config(8);
  EXPECT_NE(estimate_expected_accuracy(small_forest(), s.train, g, s.test_v, other).samples, a.samples);
}

TEST(ExpectedAccuracyTest, TrialErrorsNameTheTrial) {
  const DataSplit s = small_split();
  auto failing = [](const Dataset&) -> TrainedModel { throw Error(ErrorCode::kInvalidDataset, "boom"); };
  try {
    permuted_accuracies(failing, s.train, Grouping::singletons(4), s.test_v, 3, kExpectedAccuracyTag,
                        small_config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTrialFailed);
    EXPECT_NE(std::string(e.what()).find("trial 0 for grouping 1|2|3|4"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(ExpectedAccuracyTest, RejectsBadInputs) {
  const DataSplit s = small_split();
  TrialConfig c = small_config();
  c.N = 0;
  EXPECT_THROW(estimate_expected_accuracy(naive_bayes(), s.train, Grouping::singletons(4), s.test_v, c), Error);
  c = small_config();
  c.lower_quantile = 0.9;
  c.upper_quantile = 0.1;
  EXPECT_THROW(confidence_interval(naive_bayes(), s.train, Grouping::singletons(4), s.test_ci, c), Error);
  try {
    confidence_interval(naive_bayes(), s.train, Grouping::singletons(3), s.test_ci, small_config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGroupingMismatch);
  }
}

TEST(OjalaTest, NaiveBayesGivesPValueOne) {
  const DataSplit s = small_split();
  const auto t = ojala_test2(naive_bayes(), s.train, s.test_ci, small_config());
  EXPECT_EQ(t.p_value, 1.0);
  EXPECT_EQ(t.samples.size(), 20u);
}

TEST(OjalaTest, PValueRange) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const DataSplit s = small_split(seed);
    TrialConfig c = small_config(seed);
    const auto t = ojala_test2(small_forest(seed), s.train, s.test_ci, c);
    EXPECT_GE(t.p_value, 1.0 / static_cast<double>(c.R + 1));
    EXPECT_LE(t.p_value, 1.0);
    const auto at_least = std::count_if(t.samples.begin(), t.samples.end(), [&](double a) { return a >= t.baseline; });
    EXPECT_EQ(t.p_value, static_cast<double>(1 + at_least) / static_cast<double>(c.R + 1));
  }
}

}  // namespace
}  // namespace astrid
