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

#include "dpsynth/neighbors.h"

#include "dpsynth/errors.h"

namespace dpsynth {

Transposition FindTransposition(std::span<const int64_t> y, std::span<const int64_t> x) {
  if (y.size() != x.size()) throw UsageError("neighbour datasets differ in length");
  size_t donor = y.size();
  size_t receiver = y.size();
  for (size_t i = 0; i < y.size(); ++i) {
    if (x[i] < 0) throw UsageError("neighbour dataset has a negative count");
    const int64_t d = x[i] - y[i];
    if (d == 0) continue;
    if (d == -1 && donor == y.size()) {
      donor = i;
    } else if (d == 1 && receiver == y.size()) {
      receiver = i;
    } else {
      throw UsageError("datasets are not neighbours");
    }
  }
  if (donor == y.size() || receiver == y.size()) {
    throw UsageError("datasets are not neighbours");
  }
  return {donor, receiver};
}

}  // namespace dpsynth
