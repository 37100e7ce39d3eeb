// Copyright 2026 The captionrace Authors.
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

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "captionrace/rng.hpp"

namespace captionrace::testing {

/// Standard normal by Box-Muller; keeps test data independent of <random>.
inline double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

struct SamplePair {
  std::vector<double> a, b;
};

/// Small normal sample pairs with random sizes and mean shifts. The first
/// `exhaustive` pairs have at most 8 values per side.
inline std::vector<SamplePair> random_sample_pairs(std::uint64_t seed, std::size_t count, std::size_t exhaustive) {
  Rng rng(seed);
  std::vector<SamplePair> out;
  for (std::size_t i = 0; i < count; ++i) {
    const bool small = i < exhaustive;
    const std::size_t na = small ? 6 + rng.index(3) : 9 + rng.index(4);
    const std::size_t nb = small ? 6 + rng.index(3) : 9 + rng.index(4);
    const double shift = 1.5 * rng.uniform();
    const double scale_b = 0.5 + rng.uniform();
    SamplePair p;
    for (std::size_t k = 0; k < na; ++k) p.a.push_back(10.0 + normal(rng));
    for (std::size_t k = 0; k < nb; ++k) p.b.push_back(10.0 + shift + scale_b * normal(rng));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace captionrace::testing
