// Copyright 2026 The opophase Authors
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

#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11). Each (key, counter) pair maps to four
// independent 32-bit words, so streams can be addressed directly by index.

#include <array>
#include <cstdint>

namespace opophase {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static Counter block(Counter counter, Key key) noexcept;
};

/// SplitMix64 finalizer; a bijective 64-bit mix.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Philox key for batch `batch` of a run seeded with `seed`.
Philox4x32::Key derive_key(std::uint64_t seed, std::uint64_t batch) noexcept;

/// Uniform double in the open interval (0, 1) from two 32-bit words
/// (top 52 bits, offset by half a step so 0 and 1 never occur).
double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept;

/// Standard normal deviate by inverse CDF of an open-interval uniform.
double standard_normal_from_uniform(double u);

}  // namespace opophase
