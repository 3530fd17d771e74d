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

#ifndef KAMINO_RANDOM_H_
#define KAMINO_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace kamino {

// Seeded, labelled pseudo-random stream. Two sources built from the same
// (seed, label) produce identical draw sequences. Instances are single-owner;
// concurrent work derives child streams with Child().
class RandomSource {
 public:
  RandomSource(uint64_t seed, std::string_view label);

  uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

  // Independent stream keyed by this stream's (seed, label) and `child`.
  // Does not advance this stream.
  RandomSource Child(std::string_view child) const;

  double Uniform();                      // [0, 1)
  double Uniform(double lo, double hi);  // [lo, hi)
  double Normal(double mean = 0.0, double stddev = 1.0);
  bool Bernoulli(double p);
  // Uniform integer in [0, n).
  uint64_t UniformIndex(uint64_t n);
  // Draws an index with probability proportional to `weights`. Weights must
  // be non-negative with a positive sum.
  size_t Categorical(std::span<const double> weights);

  std::mt19937_64& engine() { return engine_; }

 private:
  uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

}  // namespace kamino

#endif  // KAMINO_RANDOM_H_
