// Copyright 2026 The dpsynth Authors
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

#ifndef DPSYNTH_NEIGHBORS_H_
#define DPSYNTH_NEIGHBORS_H_

#include <cstddef>
#include <cstdint>
#include <span>

namespace dpsynth {

// x is obtained from y by moving one event out of `donor` into `receiver`:
// x_donor = y_donor - 1, x_receiver = y_receiver + 1, all else equal.
struct Transposition {
  size_t donor;
  size_t receiver;
};

// Throws UsageError unless ‖x - y‖₁ = 2 with equal totals and x >= 0.
Transposition FindTransposition(std::span<const int64_t> y, std::span<const int64_t> x);

}  // namespace dpsynth

#endif  // DPSYNTH_NEIGHBORS_H_
