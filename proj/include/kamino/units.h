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

#ifndef KAMINO_UNITS_H_
#define KAMINO_UNITS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "kamino/random.h"
#include "kamino/schema.h"

namespace kamino {

// A modelling unit is one attribute or a group of categorical attributes
// treated as a single attribute over the product domain. Group values are
// encoded mixed-radix with the first member most significant.
using Unit = std::vector<size_t>;

// Product of member domain sizes; numerical attributes count their bins.
size_t UnitDomainSize(const Schema& schema, const Unit& unit);

// Index of the unit value held by `row` (a full-width tuple). Numerical
// attributes map to their 0-based bin.
size_t UnitValueIndex(const Schema& schema, const Unit& unit,
                      const double* row);

// Writes the member cells of unit value `index` into `row`. Numerical
// attributes draw uniformly inside the bin.
void DecodeUnitValue(const Schema& schema, const Unit& unit, size_t index,
                     double* row, RandomSource& rng);

}  // namespace kamino

#endif  // KAMINO_UNITS_H_
