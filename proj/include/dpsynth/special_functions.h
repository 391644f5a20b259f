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

#ifndef DPSYNTH_SPECIAL_FUNCTIONS_H_
#define DPSYNTH_SPECIAL_FUNCTIONS_H_

#include <cstdint>
#include <span>

namespace dpsynth {

// ln Γ(x) for x > 0. Relative error below 1e-13 for x >= 0.5, including the
// neighbourhoods of the roots at 1 and 2. Throws DomainError for x <= 0.
double LogGamma(double x);

// ln n! for n >= 0.
double LogFactorial(int64_t n);

// ln Σ exp(x_i), stable; -inf for an empty span or all -inf entries.
double LogSumExp(std::span<const double> x);

// ln of the negative binomial pmf Γ(z+r)/(z! Γ(r)) p^z (1-p)^r.
// Throws DomainError unless 0 < p < 1 and r > 0.
double LogPmfNegBin(int64_t z, double r, double p);

}  // namespace dpsynth

#endif  // DPSYNTH_SPECIAL_FUNCTIONS_H_
