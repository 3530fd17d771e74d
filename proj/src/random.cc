// Copyright 2026 The Kamino Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kamino/random.h"

#include <cassert>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace kamino {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RandomSource::RandomSource(uint64_t seed, std::string_view label)
    : seed_(seed),
      label_(label),
      engine_(SplitMix64(SplitMix64(seed) ^ Fnv1a(label))) {}

RandomSource RandomSource::Child(std::string_view child) const {
  return RandomSource(seed_, label_ + "/" + std::string(child));
}

double RandomSource::Uniform() {
  // 53 random mantissa bits; avoids implementation-specific distributions.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform();
}

double RandomSource::Normal(double mean, double stddev) {
  // Box-Muller; one variate per call keeps the stream position simple.
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  return mean + stddev * z;
}

bool RandomSource::Bernoulli(double p) { return Uniform() < p; }

uint64_t RandomSource::UniformIndex(uint64_t n) {
  assert(n > 0);
  // Rejection sampling for an unbiased index.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

size_t RandomSource::Categorical(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  assert(total > 0.0);
  double u = Uniform() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  // Rounding can leave u marginally non-negative; return the last positive.
  for (size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

}  // namespace kamino
