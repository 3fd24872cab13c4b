// Copyright 2026 The AMCC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded random streams derived from a root seed and a list of stream tags.

#ifndef AMCC_RNG_HPP_
#define AMCC_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace amcc {

inline std::mt19937_64 seeded_rng(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * parts.size());
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Child seed for an independent component of a seeded run.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) {
  std::mt19937_64 rng = seeded_rng({root, tag, 0x616d6363u});
  return rng();
}

}  // namespace amcc

#endif  // AMCC_RNG_HPP_
