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
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "astrid/dataset.hpp"
#include "astrid/error.hpp"
#include "astrid/rng.hpp"

namespace astrid {

enum class ClassifierKind { kNaiveBayes, kDecisionTree, kRandomForest, kKnn };

inline std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kNaiveBayes: return "nb";
    case ClassifierKind::kDecisionTree: return "tree";
    case ClassifierKind::kRandomForest: return "rf";
    case ClassifierKind::kKnn: return "knn";
  }
  return "?";
}

inline ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "nb" || name == "naive-bayes") return ClassifierKind::kNaiveBayes;
  if (name == "tree" || name == "decision-tree") return ClassifierKind::kDecisionTree;
  if (name == "rf" || name == "random-forest") return ClassifierKind::kRandomForest;
  if (name == "knn") return ClassifierKind::kKnn;
  throw Error(ErrorCode::kUnsupportedKind, "unknown classifier '" + std::string(name) + "'");
}

/// Which classifier to fit and how. Fields that do not apply to `kind` are
/// ignored.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kRandomForest;
  std::size_t trees = 100;               // rf
  std::size_t features_per_split = 0;    // rf; 0 means ceil(sqrt(m))
  bool bootstrap = true;                 // rf
  std::size_t neighbours = 5;            // knn
  std::uint64_t train_seed = 0;

  void check() const {
    if (kind == ClassifierKind::kRandomForest && trees == 0) {
      throw Error(ErrorCode::kInvalidArgument, "tree count must be at least 1");
    }
    if (kind == ClassifierKind::kKnn && neighbours == 0) {
      throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
    }
  }
};

/// Fitted classifier state. Implementations must be immutable after
/// construction; predictions may run concurrently.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::vector<std::size_t> predict(const Dataset& rows) const = 0;
};

/// A fitted model plus the metadata fingerprint of the data it was fitted on.
class TrainedModel {
 public:
  TrainedModel(std::shared_ptr<const Model> impl, const Dataset& trained_on)
      : impl_(std::move(impl)), fingerprint_(metadata_fingerprint(trained_on)) {}

  std::vector<std::size_t> predict(const Dataset& rows) const {
    if (metadata_fingerprint(rows) != fingerprint_) {
      throw Error(ErrorCode::kMetadataMismatch, "dataset metadata differs from the training data");
    }
    return impl_->predict(rows);
  }

  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::shared_ptr<const Model> impl_;
  std::uint64_t fingerprint_;
};

/// Anything that fits a TrainedModel to a dataset. The built-in classifiers
/// are reached through `SpecTrainer`; user classifiers plug in here.
template <class T>
concept Trainer = requires(const T& t, const Dataset& d) {
  { t(d) } -> std::convertible_to<TrainedModel>;
};

namespace detail {

inline std::size_t argmax_lowest(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

inline std::size_t argmax_lowest(const std::vector<std::size_t>& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return best;
}

/// Row order sorted by (label, cells left to right). Training on this order
/// makes a fitted model independent of how the input rows were arranged.
inline std::vector<std::size_t> canonical_row_order(const Dataset& d) {
  std::vector<std::size_t> order(d.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (d.labels[a] != d.labels[b]) return d.labels[a] < d.labels[b];
    for (const auto& col : d.columns) {
      if (col[a] != col[b]) return col[a] < col[b];
    }
    return false;
  });
  return order;
}

/// Sum of `values` in ascending order, so the result depends only on the
/// multiset of values.
inline std::pair<double, double> sorted_mean_variance(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, ss / static_cast<double>(values.size())};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Naive Bayes

/// Gaussian likelihoods for numeric attributes (variance floored at 1e-9),
/// Laplace-smoothed frequencies for nominal ones, empirical class priors.
class NaiveBayes final : public Model {
 public:
  static constexpr double kVarianceFloor = 1e-9;

  explicit NaiveBayes(const Dataset& d) : kinds_(d.attribute_kinds) {
    const std::size_t k = d.num_classes();
    const auto by_class = d.rows_by_class();
    log_prior_.assign(k, -std::numeric_limits<double>::infinity());
    stats_.assign(k, std::vector<AttributeStats>(d.cols()));
    for (std::size_t c = 0; c < k; ++c) {
      const auto& rows = by_class[c];
      if (rows.empty()) continue;
      log_prior_[c] = std::log(static_cast<double>(rows.size()) / static_cast<double>(d.rows()));
      for (std::size_t j = 0; j < d.cols(); ++j) {
        auto& s = stats_[c][j];
        if (kinds_[j].is_numeric()) {
          std::vector<double> values;
          values.reserve(rows.size());
          for (std::size_t r : rows) values.push_back(d.columns[j][r]);
          std::tie(s.mean, s.variance) = detail::sorted_mean_variance(std::move(values));
          s.variance = std::max(s.variance, kVarianceFloor);
        } else {
          const std::size_t cats = kinds_[j].categories.size();
          std::vector<std::size_t> counts(cats, 0);
          for (std::size_t r : rows) ++counts[static_cast<std::size_t>(d.columns[j][r])];
          s.log_freq.resize(cats);
          for (std::size_t v = 0; v < cats; ++v) {
            s.log_freq[v] = std::log((static_cast<double>(counts[v]) + 1.0) /
                                     static_cast<double>(rows.size() + cats));
          }
        }
      }
    }
  }

  std::vector<std::size_t> predict(const Dataset& rows) const override {
    std::vector<std::size_t> out(rows.rows());
    std::vector<double> score(log_prior_.size());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      for (std::size_t c = 0; c < score.size(); ++c) {
        double s = log_prior_[c];
        if (std::isfinite(s)) {
          for (std::size_t j = 0; j < kinds_.size(); ++j) {
            const double x = rows.columns[j][i];
            const auto& st = stats_[c][j];
            if (kinds_[j].is_numeric()) {
              const double z = x - st.mean;
              s += -0.5 * std::log(2.0 * std::numbers::pi * st.variance) - z * z / (2.0 * st.variance);
            } else {
              s += st.log_freq[static_cast<std::size_t>(x)];
            }
          }
        }
        score[c] = s;
      }
      out[i] = detail::argmax_lowest(score);
    }
    return out;
  }

  /// Per-class (mean, variance) of a numeric attribute; exposed for tests.
  std::pair<double, double> gaussian(std::size_t cls, std::size_t attribute) const {
    return {stats_[cls][attribute].mean, stats_[cls][attribute].variance};
  }

 private:
  struct AttributeStats {
    double mean = 0.0;
    double variance = 1.0;
    std::vector<double> log_freq;
  };
  std::vector<AttributeKind> kinds_;
  std::vector<double> log_prior_;
  std::vector<std::vector<AttributeStats>> stats_;
};

// ---------------------------------------------------------------------------
// CART trees

/// Unpruned CART tree with Gini impurity. Numeric splits send x <= threshold
/// left, thresholds at midpoints of adjacent distinct values; nominal splits
/// send one category left and the rest right.
class Tree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 for a leaf
    bool nominal = false;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::size_t label = 0;
  };

  std::size_t predict_row(const Dataset& d, std::size_t row) const {
    std::uint32_t at = 0;
    while (nodes_[at].feature >= 0) {
      const Node& n = nodes_[at];
      const double x = d.columns[static_cast<std::size_t>(n.feature)][row];
      const bool go_left = n.nominal ? x == n.threshold : x <= n.threshold;
      at = go_left ? n.left : n.right;
    }
    return nodes_[at].label;
  }

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  friend class TreeBuilder;
  std::vector<Node> nodes_;
};

/// Grows trees over one (canonically ordered) training set. Holds the
/// per-feature sort order of the rows so that each tree can build its
/// presorted sample lists in linear time.
class TreeBuilder {
 public:
  explicit TreeBuilder(const Dataset& d) : d_(d), sorted_rows_(d.cols()) {
    for (std::size_t f = 0; f < d.cols(); ++f) {
      auto& order = sorted_rows_[f];
      order.resize(d.rows());
      std::iota(order.begin(), order.end(), 0);
      const auto& col = d.columns[f];
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    }
  }

  /// `multiplicity[r]` copies of training row r form the sample. At each
  /// node up to `features_per_split` non-constant features are considered,
  /// drawn with `rng` when fewer than all are requested.
  Tree grow(const std::vector<std::uint32_t>& multiplicity, std::size_t features_per_split,
            RandomStream* rng) const {
    const std::size_t m = d_.cols();
    const std::size_t k = d_.num_classes();
    std::size_t total = 0;
    for (auto c : multiplicity) total += c;

    // order[f] lists sample rows (with repeats) sorted by feature f.
    std::vector<std::vector<std::uint32_t>> order(m);
    for (std::size_t f = 0; f < m; ++f) {
      order[f].reserve(total);
      for (std::size_t r : sorted_rows_[f]) {
        for (std::uint32_t c = 0; c < multiplicity[r]; ++c) order[f].push_back(static_cast<std::uint32_t>(r));
      }
    }

    Tree tree;
    std::vector<std::uint8_t> goes_left(d_.rows(), 0);
    std::vector<std::uint32_t> scratch(total);
    std::vector<std::size_t> counts(k), left(k);
    std::vector<std::size_t> features(m);
    std::vector<std::size_t> chosen;
    std::vector<std::vector<std::size_t>> cat_counts;

    struct Pending {
      std::uint32_t node;
      std::size_t lo, hi;
    };
    std::vector<Pending> stack;
    tree.nodes_.emplace_back();
    stack.push_back({0, 0, total});

    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      const std::size_t n = p.hi - p.lo;

      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t t = p.lo; t < p.hi; ++t) ++counts[d_.labels[order[0][t]]];
      tree.nodes_[p.node].label = detail::argmax_lowest(counts);
      const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
      if (pure || n < 2) continue;

      // Candidate features, evaluated in ascending index order.
      chosen.clear();
      std::iota(features.begin(), features.end(), 0);
      const bool sample_features = features_per_split < m && rng != nullptr;
      for (std::size_t s = 0; s < m && chosen.size() < features_per_split; ++s) {
        if (sample_features) {
          std::uniform_int_distribution<std::size_t> pick(s, m - 1);
          std::swap(features[s], features[pick(*rng)]);
        }
        const std::size_t f = features[s];
        const auto& col = d_.columns[f];
        if (col[order[f][p.lo]] != col[order[f][p.hi - 1]]) chosen.push_back(f);
      }
      if (chosen.empty()) continue;
      std::sort(chosen.begin(), chosen.end());

      double best_score = -std::numeric_limits<double>::infinity();
      std::int32_t best_feature = -1;
      double best_threshold = 0.0;
      bool best_nominal = false;
      for (std::size_t f : chosen) {
        const auto& col = d_.columns[f];
        const auto& ord = order[f];
        if (d_.attribute_kinds[f].is_numeric()) {
          std::fill(left.begin(), left.end(), 0);
          double sq_left = 0.0;
          double sq_right = 0.0;
          for (std::size_t c = 0; c < k; ++c) sq_right += static_cast<double>(counts[c] * counts[c]);
          for (std::size_t t = p.lo; t + 1 < p.hi; ++t) {
            const std::size_t c = d_.labels[ord[t]];
            const std::size_t right_c = counts[c] - left[c];
            sq_left += static_cast<double>(2 * left[c] + 1);
            sq_right -= static_cast<double>(2 * right_c - 1);
            ++left[c];
            const double x = col[ord[t]];
            const double next = col[ord[t + 1]];
            if (x == next) continue;
            const std::size_t nl = t + 1 - p.lo;
            const double score = sq_left / static_cast<double>(nl) + sq_right / static_cast<double>(n - nl);
            if (score > best_score) {
              best_score = score;
              best_feature = static_cast<std::int32_t>(f);
              best_nominal = false;
              best_threshold = x + (next - x) / 2.0;
              if (!(best_threshold < next)) best_threshold = x;
            }
          }
        } else {
          const std::size_t cats = d_.attribute_kinds[f].categories.size();
          cat_counts.assign(cats, std::vector<std::size_t>(k, 0));
          for (std::size_t t = p.lo; t < p.hi; ++t) {
            ++cat_counts[static_cast<std::size_t>(col[ord[t]])][d_.labels[ord[t]]];
          }
          for (std::size_t v = 0; v < cats; ++v) {
            std::size_t nl = 0;
            double sq_left = 0.0;
            double sq_right = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
              nl += cat_counts[v][c];
              sq_left += static_cast<double>(cat_counts[v][c] * cat_counts[v][c]);
              const std::size_t rc = counts[c] - cat_counts[v][c];
              sq_right += static_cast<double>(rc * rc);
            }
            if (nl == 0 || nl == n) continue;
            const double score = sq_left / static_cast<double>(nl) + sq_right / static_cast<double>(n - nl);
            if (score > best_score) {
              best_score = score;
              best_feature = static_cast<std::int32_t>(f);
              best_nominal = true;
              best_threshold = static_cast<double>(v);
            }
          }
        }
      }
      if (best_feature < 0) continue;

      const auto& split_col = d_.columns[static_cast<std::size_t>(best_feature)];
      std::size_t n_left = 0;
      for (std::size_t t = p.lo; t < p.hi; ++t) {
        const std::uint32_t r = order[0][t];
        const double x = split_col[r];
        goes_left[r] = best_nominal ? (x == best_threshold) : (x <= best_threshold);
        n_left += goes_left[r];
      }
      for (std::size_t f = 0; f < m; ++f) {
        auto& ord = order[f];
        std::size_t l = p.lo;
        std::size_t rpos = 0;
        for (std::size_t t = p.lo; t < p.hi; ++t) {
          if (goes_left[ord[t]]) {
            ord[l++] = ord[t];
          } else {
            scratch[rpos++] = ord[t];
          }
        }
        std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(rpos),
                  ord.begin() + static_cast<std::ptrdiff_t>(l));
      }

      const auto left_id = static_cast<std::uint32_t>(tree.nodes_.size());
      tree.nodes_.emplace_back();
      tree.nodes_.emplace_back();
      Tree::Node& node = tree.nodes_[p.node];
      node.feature = best_feature;
      node.nominal = best_nominal;
      node.threshold = best_threshold;
      node.left = left_id;
      node.right = left_id + 1;
      stack.push_back({left_id + 1, p.lo + n_left, p.hi});
      stack.push_back({left_id, p.lo, p.lo + n_left});
    }
    return tree;
  }

 private:
  const Dataset& d_;
  std::vector<std::vector<std::size_t>> sorted_rows_;
};

/// Majority vote over trees; vote ties go to the lowest class index. A plain
/// decision tree is the one-tree, no-bootstrap, all-features case.
class Forest final : public Model {
 public:
  Forest(const Dataset& d, std::size_t trees, std::size_t features_per_split, bool bootstrap,
         std::uint64_t seed)
      : num_classes_(d.num_classes()) {
    const Dataset canonical = d.select_rows(detail::canonical_row_order(d));
    const TreeBuilder builder(canonical);
    const std::size_t n = canonical.rows();
    trees_.reserve(trees);
    for (std::size_t t = 0; t < trees; ++t) {
      auto rng = derive_stream(seed, "forest-tree", {}, t);
      std::vector<std::uint32_t> multiplicity(n, bootstrap ? 0 : 1);
      if (bootstrap) {
        std::uniform_int_distribution<std::size_t> draw(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) ++multiplicity[draw(rng)];
      }
      trees_.push_back(builder.grow(multiplicity, features_per_split, &rng));
    }
  }

  std::vector<std::size_t> predict(const Dataset& rows) const override {
    std::vector<std::size_t> out(rows.rows());
    std::vector<std::size_t> votes(num_classes_);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      std::fill(votes.begin(), votes.end(), 0);
      for (const auto& tree : trees_) ++votes[tree.predict_row(rows, i)];
      out[i] = detail::argmax_lowest(votes);
    }
    return out;
  }

  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::size_t num_classes_;
  std::vector<Tree> trees_;
};

// ---------------------------------------------------------------------------
// k-nearest neighbours

/// Euclidean distance over z-scored numeric attributes plus a 0/1 mismatch
/// term per nominal attribute. Distance ties go to the lower (canonical)
/// training row; vote ties to the lowest class index.
class Knn final : public Model {
 public:
  Knn(const Dataset& d, std::size_t k)
      : k_(k), kinds_(d.attribute_kinds), num_classes_(d.num_classes()) {
    train_ = d.select_rows(detail::canonical_row_order(d));
    mean_.assign(d.cols(), 0.0);
    scale_.assign(d.cols(), 1.0);
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (!kinds_[j].is_numeric()) continue;
      const auto [mean, variance] = detail::sorted_mean_variance(train_.columns[j]);
      mean_[j] = mean;
      scale_[j] = variance > 0.0 ? std::sqrt(variance) : 1.0;
      for (double& v : train_.columns[j]) v = (v - mean) / scale_[j];
    }
  }

  std::vector<std::size_t> predict(const Dataset& rows) const override {
    const std::size_t n = train_.rows();
    const std::size_t k = std::min(k_, n);
    std::vector<std::size_t> out(rows.rows());
    std::vector<std::pair<double, std::size_t>> dist(n);
    std::vector<double> query(kinds_.size());
    std::vector<std::size_t> votes(num_classes_);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      for (std::size_t j = 0; j < kinds_.size(); ++j) {
        query[j] = kinds_[j].is_numeric() ? (rows.columns[j][i] - mean_[j]) / scale_[j] : rows.columns[j][i];
      }
      for (std::size_t r = 0; r < n; ++r) dist[r] = {0.0, r};
      for (std::size_t j = 0; j < kinds_.size(); ++j) {
        const auto& col = train_.columns[j];
        if (kinds_[j].is_numeric()) {
          for (std::size_t r = 0; r < n; ++r) {
            const double z = col[r] - query[j];
            dist[r].first += z * z;
          }
        } else {
          for (std::size_t r = 0; r < n; ++r) dist[r].first += col[r] != query[j] ? 1.0 : 0.0;
        }
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      std::fill(votes.begin(), votes.end(), 0);
      for (std::size_t t = 0; t < k; ++t) ++votes[train_.labels[dist[t].second]];
      out[i] = detail::argmax_lowest(votes);
    }
    return out;
  }

 private:
  std::size_t k_;
  std::vector<AttributeKind> kinds_;
  std::size_t num_classes_;
  Dataset train_;
  std::vector<double> mean_;
  std::vector<double> scale_;
};

// ---------------------------------------------------------------------------

inline std::size_t default_features_per_split(std::size_t m) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
}

/// Fits the classifier described by `spec`. Deterministic in (spec, data),
/// and invariant to the order of the training rows.
inline TrainedModel train(const ClassifierSpec& spec, const Dataset& d) {
  spec.check();
  std::size_t present = 0;
  for (std::size_t c : d.class_counts()) present += c > 0;
  if (present < 2) {
    throw Error(ErrorCode::kSingleClassTraining, "training data holds " + std::to_string(present) + " class(es)");
  }
  if (const auto violations = validate(d); !violations.empty()) {
    throw Error(ErrorCode::kInvalidDataset, violations.front().message);
  }
  std::shared_ptr<const Model> model;
  switch (spec.kind) {
    case ClassifierKind::kNaiveBayes:
      model = std::make_shared<NaiveBayes>(d);
      break;
    case ClassifierKind::kDecisionTree:
      model = std::make_shared<Forest>(d, 1, d.cols(), false, spec.train_seed);
      break;
    case ClassifierKind::kRandomForest: {
      const std::size_t mtry =
          spec.features_per_split == 0 ? default_features_per_split(d.cols()) : spec.features_per_split;
      model = std::make_shared<Forest>(d, spec.trees, mtry, spec.bootstrap, spec.train_seed);
      break;
    }
    case ClassifierKind::kKnn:
      model = std::make_shared<Knn>(d, spec.neighbours);
      break;
    default:
      throw Error(ErrorCode::kUnsupportedKind, "unsupported classifier kind");
  }
  return TrainedModel(std::move(model), d);
}

/// Adapts a ClassifierSpec to the Trainer concept.
struct SpecTrainer {
  ClassifierSpec spec;
  TrainedModel operator()(const Dataset& d) const { return train(spec, d); }
};

inline std::vector<std::size_t> predict(const TrainedModel& model, const Dataset& rows) {
  return model.predict(rows);
}

}  // namespace astrid
