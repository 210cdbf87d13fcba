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

#include <cstdint>
#include <random>
#include <string_view>

namespace astrid {

using RandomStream = std::mt19937_64;

namespace detail {

// FNV-1a; std::hash gives no stability guarantee across library versions.
constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
inline std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace detail

/// Stream for trial `index` of a batch. Depends only on its arguments, so a
/// trial draws the same numbers whichever thread runs it and in whatever order.
inline RandomStream derive_stream(std::uint64_t master_seed, std::string_view purpose,
                                  std::string_view key, std::uint64_t index) {
  const std::uint64_t p = detail::fnv1a(purpose);
  const std::uint64_t k = detail::fnv1a(key);
  std::seed_seq seq{detail::lo32(master_seed), detail::hi32(master_seed),
                    detail::lo32(p),           detail::hi32(p),
                    detail::lo32(k),           detail::hi32(k),
                    detail::lo32(index),       detail::hi32(index)};
  return RandomStream(seq);
}

inline RandomStream derive_stream(std::uint64_t seed, std::string_view purpose) {
  return derive_stream(seed, purpose, {}, 0);
}

}  // namespace astrid
