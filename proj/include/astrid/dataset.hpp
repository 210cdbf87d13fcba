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
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "astrid/error.hpp"
#include "astrid/rng.hpp"

namespace astrid {

/// Numeric, or nominal with an ordered category list. Nominal cells store the
/// category index as a double so that every column has one representation.
struct AttributeKind {
  enum class Type { kNumeric, kNominal };

  Type type = Type::kNumeric;
  std::vector<std::string> categories;

  static AttributeKind numeric() { return {}; }
  static AttributeKind nominal(std::vector<std::string> categories) {
    return {Type::kNominal, std::move(categories)};
  }

  bool is_nominal() const { return type == Type::kNominal; }
  bool is_numeric() const { return type == Type::kNumeric; }

  friend bool operator==(const AttributeKind&, const AttributeKind&) = default;
};

/// Marker stored in a cell that has no value. Only datasets that have not
/// been through `preprocess` may contain it.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double cell) { return std::isnan(cell); }

/// Column-major n x m attribute matrix with one class label per row.
struct Dataset {
  std::vector<std::string> attribute_names;
  std::vector<AttributeKind> attribute_kinds;
  std::vector<std::vector<double>> columns;  // columns[j][i]
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return columns.size(); }
  std::size_t num_classes() const { return class_names.size(); }

  double at(std::size_t row, std::size_t col) const { return columns[col][row]; }

  /// Empty dataset with the same attribute and class metadata.
  Dataset empty_like() const {
    Dataset out;
    out.attribute_names = attribute_names;
    out.attribute_kinds = attribute_kinds;
    out.class_names = class_names;
    out.columns.resize(cols());
    return out;
  }

  Dataset select_rows(std::span<const std::size_t> row_ids) const {
    Dataset out = empty_like();
    out.labels.reserve(row_ids.size());
    for (std::size_t r : row_ids) out.labels.push_back(labels[r]);
    for (std::size_t j = 0; j < cols(); ++j) {
      out.columns[j].reserve(row_ids.size());
      for (std::size_t r : row_ids) out.columns[j].push_back(columns[j][r]);
    }
    return out;
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(num_classes(), 0);
    for (std::size_t c : labels) {
      if (c < counts.size()) ++counts[c];
    }
    return counts;
  }

  /// Row indices of each class, ascending.
  std::vector<std::vector<std::size_t>> rows_by_class() const {
    std::vector<std::vector<std::size_t>> out(num_classes());
    for (std::size_t i = 0; i < rows(); ++i) out[labels[i]].push_back(i);
    return out;
  }

  double major_class_proportion() const {
    if (rows() == 0) return 0.0;
    const auto counts = class_counts();
    return static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
           static_cast<double>(rows());
  }
};

/// Cell-level equality; compares bit patterns so missing cells compare equal.
inline bool bitwise_equal(const Dataset& a, const Dataset& b) {
  if (a.attribute_names != b.attribute_names || a.attribute_kinds != b.attribute_kinds ||
      a.class_names != b.class_names || a.labels != b.labels || a.cols() != b.cols()) {
    return false;
  }
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (a.columns[j].size() != b.columns[j].size()) return false;
    for (std::size_t i = 0; i < a.columns[j].size(); ++i) {
      if (std::bit_cast<std::uint64_t>(a.columns[j][i]) !=
          std::bit_cast<std::uint64_t>(b.columns[j][i])) {
        return false;
      }
    }
  }
  return true;
}

inline bool same_metadata(const Dataset& a, const Dataset& b) {
  return a.attribute_names == b.attribute_names && a.attribute_kinds == b.attribute_kinds &&
         a.class_names == b.class_names;
}

/// Hash of attribute names, kinds, and class names.
inline std::uint64_t metadata_fingerprint(const Dataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    h ^= detail::fnv1a(s) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (std::size_t j = 0; j < d.attribute_names.size(); ++j) {
    mix(d.attribute_names[j]);
    const auto& kind = d.attribute_kinds[j];
    mix(kind.is_nominal() ? "{nominal}" : "{numeric}");
    for (const auto& c : kind.categories) mix(c);
  }
  mix("{classes}");
  for (const auto& c : d.class_names) mix(c);
  return h;
}

struct Violation {
  std::optional<std::size_t> row;
  std::optional<std::size_t> col;
  std::string message;
};

/// Checks every Dataset invariant; returns one entry per violation.
inline std::vector<Violation> validate(const Dataset& d) {
  std::vector<Violation> out;
  const std::size_t n = d.rows();
  const std::size_t m = d.cols();
  if (n == 0) out.push_back({std::nullopt, std::nullopt, "dataset has no rows"});
  if (m == 0) out.push_back({std::nullopt, std::nullopt, "dataset has no attributes"});
  if (d.attribute_names.size() != m || d.attribute_kinds.size() != m) {
    out.push_back({std::nullopt, std::nullopt, "attribute metadata does not match column count"});
    return out;
  }
  std::set<std::string> seen_names;
  for (std::size_t j = 0; j < m; ++j) {
    if (!seen_names.insert(d.attribute_names[j]).second) {
      out.push_back({std::nullopt, j, "duplicate attribute name '" + d.attribute_names[j] + "'"});
    }
    const auto& kind = d.attribute_kinds[j];
    if (kind.is_nominal()) {
      if (kind.categories.empty()) {
        out.push_back({std::nullopt, j, "nominal attribute has no categories"});
      }
      std::set<std::string> cats(kind.categories.begin(), kind.categories.end());
      if (cats.size() != kind.categories.size()) {
        out.push_back({std::nullopt, j, "nominal attribute has duplicate categories"});
      }
    }
    if (d.columns[j].size() != n) {
      out.push_back({std::nullopt, j, "column length differs from label count"});
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double cell = d.columns[j][i];
      if (is_missing(cell)) {
        out.push_back({i, j, "missing cell"});
      } else if (kind.is_nominal()) {
        if (cell < 0 || cell != std::floor(cell) ||
            cell >= static_cast<double>(kind.categories.size())) {
          out.push_back({i, j, "category index out of range"});
        }
      } else if (!std::isfinite(cell)) {
        out.push_back({i, j, "non-finite numeric cell"});
      }
    }
  }
  std::vector<std::size_t> counts(d.num_classes(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (d.labels[i] >= d.num_classes()) {
      out.push_back({i, std::nullopt, "class index out of range"});
    } else {
      ++counts[d.labels[i]];
    }
  }
  std::set<std::string> class_set(d.class_names.begin(), d.class_names.end());
  if (class_set.size() != d.class_names.size()) {
    out.push_back({std::nullopt, std::nullopt, "duplicate class names"});
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      out.push_back({std::nullopt, std::nullopt, "class '" + d.class_names[c] + "' never occurs"});
    }
  }
  return out;
}

/// Drops rows with any missing cell, then (one pass) columns whose remaining
/// values are all identical. Class names left without rows are dropped too.
inline Dataset preprocess(const Dataset& d) {
  std::vector<std::size_t> keep_rows;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    bool complete = true;
    for (const auto& col : d.columns) {
      if (is_missing(col[i])) {
        complete = false;
        break;
      }
    }
    if (complete) keep_rows.push_back(i);
  }
  if (keep_rows.empty()) throw Error(ErrorCode::kEmptyResult, "no complete rows remain");

  const Dataset rows_kept = d.select_rows(keep_rows);

  Dataset out;
  for (std::size_t j = 0; j < rows_kept.cols(); ++j) {
    const auto& col = rows_kept.columns[j];
    const bool constant = std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; });
    if (constant) continue;
    out.attribute_names.push_back(rows_kept.attribute_names[j]);
    out.attribute_kinds.push_back(rows_kept.attribute_kinds[j]);
    out.columns.push_back(col);
  }
  if (out.columns.empty()) throw Error(ErrorCode::kEmptyResult, "every attribute is constant");

  const auto counts = rows_kept.class_counts();
  std::vector<std::size_t> remap(counts.size(), 0);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    remap[c] = out.class_names.size();
    out.class_names.push_back(rows_kept.class_names[c]);
  }
  out.labels.reserve(rows_kept.rows());
  for (std::size_t c : rows_kept.labels) out.labels.push_back(remap[c]);
  return out;
}

struct SplitFractions {
  double train = 0.5;
  double test_v = 0.25;
  double test_ci = 0.25;
};

struct DataSplit {
  Dataset train;
  Dataset test_v;
  Dataset test_ci;
};

/// Largest-remainder apportionment of `total` items over `fractions`; ties go
/// to the earlier part.
inline std::array<std::size_t, 3> apportion(std::size_t total, const SplitFractions& f) {
  const std::array<double, 3> w{f.train, f.test_v, f.test_ci};
  const double sum = w[0] + w[1] + w[2];
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    const double exact = static_cast<double>(total) * w[p] / sum;
    counts[p] = static_cast<std::size_t>(std::floor(exact));
    remainder[p] = exact - static_cast<double>(counts[p]);
    assigned += counts[p];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[order[i % 3]];
  return counts;
}

/// Stratified three-way split. Each class's rows are shuffled with a stream
/// derived from `seed` and cut by largest-remainder counts; rows keep their
/// original relative order within each part.
inline DataSplit stratified_split(const Dataset& d, std::uint64_t seed,
                                  const SplitFractions& fractions = {}) {
  if (fractions.train <= 0 || fractions.test_v <= 0 || fractions.test_ci <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must be positive");
  }
  std::array<std::vector<std::size_t>, 3> parts;
  const auto by_class = d.rows_by_class();
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto rows = by_class[c];
    if (rows.size() < 3) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class '" + d.class_names[c] + "' has " + std::to_string(rows.size()) +
                      " rows; at least 3 are needed");
    }
    const auto counts = apportion(rows.size(), fractions);
    if (counts[0] == 0 || counts[1] == 0 || counts[2] == 0) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class '" + d.class_names[c] + "' cannot be represented in every part");
    }
    auto rng = derive_stream(seed, "split", d.class_names[c], c);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      parts[p].insert(parts[p].end(), rows.begin() + static_cast<std::ptrdiff_t>(offset),
                      rows.begin() + static_cast<std::ptrdiff_t>(offset + counts[p]));
      offset += counts[p];
    }
  }
  for (auto& p : parts) std::sort(p.begin(), p.end());
  return {d.select_rows(parts[0]), d.select_rows(parts[1]), d.select_rows(parts[2])};
}

}  // namespace astrid
