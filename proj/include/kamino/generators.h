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

#ifndef KAMINO_GENERATORS_H_
#define KAMINO_GENERATORS_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "kamino/dataset.h"
#include "kamino/schema.h"

namespace kamino {

// A reproducible demo instance with its constraint file text.
struct GeneratedData {
  Schema schema;
  Dataset data;
  std::string dc_text;
};

// Census-like relation with 8 mixed attributes and two hard constraints:
// edu determines edu_num, and capital gain and loss never order oppositely.
// The generated instance satisfies both.
GeneratedData GenerateAdultLike(size_t n, uint64_t seed);

// Survey-like relation with 8 small-domain attributes driven by a latent
// level and three soft order constraints (weights left to be learned). A
// small fraction of corrupted rows yields low but non-zero violation rates.
GeneratedData GenerateSurveyLike(size_t n, uint64_t seed);

}  // namespace kamino

#endif  // KAMINO_GENERATORS_H_
