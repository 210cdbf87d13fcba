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
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "astrid/dataset.hpp"
#include "astrid/error.hpp"
#include "astrid/rng.hpp"

namespace astrid {

/// A partition of the attribute indices {0..m-1}, kept in canonical form:
/// each group sorted ascending, groups ordered by their smallest member.
/// The text form is 1-based, e.g. "1,2|3|4".
class Grouping {
 public:
  Grouping() = default;

  /// Validates and canonicalizes. Indices are 0-based.
  Grouping(std::vector<std::vector<std::size_t>> groups, std::size_t m) : m_(m) {
    std::vector<int> seen(m, 0);
    for (auto& g : groups) {
      if (g.empty()) throw Error(ErrorCode::kNotAPartition, "empty group");
      for (std::size_t a : g) {
        if (a >= m) {
          throw Error(ErrorCode::kNotAPartition,
                      "attribute " + std::to_string(a + 1) + " exceeds m=" + std::to_string(m));
        }
        if (seen[a]++) {
          throw Error(ErrorCode::kNotAPartition, "attribute " + std::to_string(a + 1) + " appears twice");
        }
      }
      std::sort(g.begin(), g.end());
    }
    for (std::size_t a = 0; a < m; ++a) {
      if (!seen[a]) throw Error(ErrorCode::kNotAPartition, "attribute " + std::to_string(a + 1) + " missing");
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    groups_ = std::move(groups);
  }

  static Grouping single_group(std::size_t m) {
    std::vector<std::size_t> all(m);
    for (std::size_t a = 0; a < m; ++a) all[a] = a;
    return Grouping({all}, m);
  }

  static Grouping singletons(std::size_t m) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t a = 0; a < m; ++a) groups.push_back({a});
    return Grouping(std::move(groups), m);
  }

  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }
  std::size_t num_attributes() const { return m_; }

  std::size_t group_of(std::size_t attribute) const {
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      if (std::binary_search(groups_[g].begin(), groups_[g].end(), attribute)) return g;
    }
    throw Error(ErrorCode::kInvalidArgument, "attribute " + std::to_string(attribute + 1) + " not in grouping");
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      if (g) out += "|";
      for (std::size_t k = 0; k < groups_[g].size(); ++k) {
        if (k) out += ",";
        out += std::to_string(groups_[g][k] + 1);
      }
    }
    return out;
  }

  /// One group letter per attribute (A for the first canonical group, ...,
  /// Z, AA, AB, ...).
  std::vector<std::string> letters() const {
    std::vector<std::string> out(m_);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      std::string label;
      std::size_t v = g;
      do {
        label.insert(label.begin(), static_cast<char>('A' + v % 26));
        v = v / 26;
      } while (v-- > 0);
      for (std::size_t a : groups_[g]) out[a] = label;
    }
    return out;
  }

  friend bool operator==(const Grouping&, const Grouping&) = default;
  friend auto operator<=>(const Grouping&, const Grouping&) = default;

 private:
  std::size_t m_ = 0;
  std::vector<std::vector<std::size_t>> groups_;
};

/// Parses "i,j|k|..." with 1-based indices.
inline Grouping parse_grouping(std::string_view text, std::size_t m) {
  std::vector<std::vector<std::size_t>> groups(1);
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorCode::kParseError,
                "grouping '" + std::string(text) + "' at offset " + std::to_string(pos) + ": expected " + what);
  };
  while (true) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    const std::size_t start = pos;
    std::size_t value = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      value = value * 10 + static_cast<std::size_t>(text[pos] - '0');
      if (value > 1'000'000'000) fail("attribute index of reasonable size");
      ++pos;
    }
    if (pos == start) fail("attribute index");
    if (value == 0) fail("1-based attribute index");
    groups.back().push_back(value - 1);
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos == text.size()) break;
    if (text[pos] == ',') {
      ++pos;
    } else if (text[pos] == '|') {
      ++pos;
      groups.emplace_back();
    } else {
      fail("',' or '|'");
    }
  }
  return Grouping(std::move(groups), m);
}

/// Moves `attribute` (0-based) out of its group into a new singleton group.
inline Grouping split_out(const Grouping& grouping, std::size_t attribute) {
  auto groups = grouping.groups();
  const std::size_t g = grouping.group_of(attribute);
  if (groups[g].size() < 2) {
    throw Error(ErrorCode::kAlreadySingleton, "attribute " + std::to_string(attribute + 1) + " is already a singleton");
  }
  std::erase(groups[g], attribute);
  groups.push_back({attribute});
  return Grouping(std::move(groups), grouping.num_attributes());
}

/// One bijection per (class, group): bijections[c][g][t] is the position,
/// within class c's ascending row list, that supplies position t.
struct PermutationPlan {
  std::vector<std::vector<std::size_t>> class_rows;
  std::vector<std::vector<std::vector<std::size_t>>> bijections;
};

inline void check_grouping(const Dataset& d, const Grouping& grouping) {
  if (grouping.num_attributes() != d.cols()) {
    throw Error(ErrorCode::kGroupingMismatch, "grouping covers " + std::to_string(grouping.num_attributes()) +
                                                  " attributes, dataset has " + std::to_string(d.cols()));
  }
}

/// Draws a uniform plan: each (class, group) bijection is an independent
/// Fisher-Yates shuffle.
inline PermutationPlan sample_plan(const Dataset& d, const Grouping& grouping, RandomStream& rng) {
  check_grouping(d, grouping);
  PermutationPlan plan;
  plan.class_rows = d.rows_by_class();
  plan.bijections.resize(plan.class_rows.size());
  for (std::size_t c = 0; c < plan.class_rows.size(); ++c) {
    const std::size_t n_c = plan.class_rows[c].size();
    for (std::size_t g = 0; g < grouping.size(); ++g) {
      std::vector<std::size_t> perm(n_c);
      for (std::size_t t = 0; t < n_c; ++t) perm[t] = t;
      std::shuffle(perm.begin(), perm.end(), rng);
      plan.bijections[c].push_back(std::move(perm));
    }
  }
  return plan;
}

inline Dataset apply_plan(const Dataset& d, const Grouping& grouping, const PermutationPlan& plan) {
  check_grouping(d, grouping);
  Dataset out = d;
  for (std::size_t c = 0; c < plan.class_rows.size(); ++c) {
    const auto& rows = plan.class_rows[c];
    for (std::size_t g = 0; g < grouping.size(); ++g) {
      const auto& perm = plan.bijections[c][g];
      for (std::size_t j : grouping.groups()[g]) {
        const auto& src = d.columns[j];
        auto& dst = out.columns[j];
        for (std::size_t t = 0; t < rows.size(); ++t) dst[rows[t]] = src[rows[perm[t]]];
      }
    }
  }
  return out;
}

/// Returns D^S: within each class, the columns of each group are reordered
/// jointly by one uniformly random bijection. Labels are untouched.
inline Dataset sample_permuted(const Dataset& d, const Grouping& grouping, RandomStream& rng) {
  return apply_plan(d, grouping, sample_plan(d, grouping, rng));
}

namespace detail {

inline std::vector<std::uint64_t> cell_key(const Dataset& d) {
  std::vector<std::uint64_t> key;
  key.reserve(d.rows() * d.cols());
  for (const auto& col : d.columns) {
    for (double v : col) key.push_back(std::bit_cast<std::uint64_t>(v));
  }
  return key;
}

}  // namespace detail

/// Upper bound on the number of plans: prod over classes and groups of n_c!.
/// Saturates at `cap + 1`.
inline std::uint64_t plan_count(const Dataset& d, const Grouping& grouping, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (const auto& rows : d.rows_by_class()) {
    std::uint64_t fact = 1;
    for (std::size_t k = 2; k <= rows.size(); ++k) {
      fact *= k;
      if (fact > cap) return cap + 1;
    }
    for (std::size_t g = 0; g < grouping.size(); ++g) {
      if (fact > 1 && total > cap / fact) return cap + 1;
      total *= fact;
    }
  }
  return total;
}

/// Exhaustively enumerates every plan and returns the distinct datasets they
/// produce, ordered by cell bit pattern. Refuses more than 10^6 plans.
inline std::vector<Dataset> enumerate_permuted(const Dataset& d, const Grouping& grouping,
                                               std::uint64_t max_plans = 1'000'000) {
  check_grouping(d, grouping);
  const std::uint64_t bound = plan_count(d, grouping, max_plans);
  if (bound > max_plans) {
    throw Error(ErrorCode::kTooLarge, "more than " + std::to_string(max_plans) + " permutation plans");
  }
  PermutationPlan plan;
  plan.class_rows = d.rows_by_class();
  plan.bijections.resize(plan.class_rows.size());
  // Odometer over (class, group) slots, each cycling through all n_c! orders.
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t c = 0; c < plan.class_rows.size(); ++c) {
    for (std::size_t g = 0; g < grouping.size(); ++g) {
      std::vector<std::size_t> perm(plan.class_rows[c].size());
      for (std::size_t t = 0; t < perm.size(); ++t) perm[t] = t;
      plan.bijections[c].push_back(std::move(perm));
      slots.emplace_back(c, g);
    }
  }
  std::map<std::vector<std::uint64_t>, Dataset> distinct;
  while (true) {
    Dataset out = apply_plan(d, grouping, plan);
    auto key = detail::cell_key(out);
    distinct.emplace(std::move(key), std::move(out));
    std::size_t s = 0;
    for (; s < slots.size(); ++s) {
      auto& perm = plan.bijections[slots[s].first][slots[s].second];
      if (std::next_permutation(perm.begin(), perm.end())) break;
      // next_permutation wrapped around to the identity; carry.
    }
    if (s == slots.size()) break;
  }
  std::vector<Dataset> result;
  result.reserve(distinct.size());
  for (auto& [key, ds] : distinct) result.push_back(std::move(ds));
  return result;
}

}  // namespace astrid
