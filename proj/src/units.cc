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

#include "kamino/units.h"

namespace kamino {

size_t UnitDomainSize(const Schema& schema, const Unit& unit) {
  size_t size = 1;
  for (size_t a : unit) size *= schema.attribute(a).DomainSize();
  return size;
}

size_t UnitValueIndex(const Schema& schema, const Unit& unit,
                      const double* row) {
  size_t index = 0;
  for (size_t a : unit) {
    const AttributeSpec& spec = schema.attribute(a);
    const size_t digit = spec.is_categorical()
                             ? static_cast<size_t>(row[a])
                             : static_cast<size_t>(BinOf(row[a], spec));
    index = index * spec.DomainSize() + digit;
  }
  return index;
}

void DecodeUnitValue(const Schema& schema, const Unit& unit, size_t index,
                     double* row, RandomSource& rng) {
  for (size_t m = unit.size(); m-- > 0;) {
    const AttributeSpec& spec = schema.attribute(unit[m]);
    const size_t digit = index % spec.DomainSize();
    index /= spec.DomainSize();
    row[unit[m]] = spec.is_categorical()
                       ? static_cast<double>(digit)
                       : DrawInBin(static_cast<int>(digit), spec, rng);
  }
}

}  // namespace kamino
