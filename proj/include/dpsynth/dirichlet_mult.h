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

// Multinomial-Dirichlet synthesizer: θ | y ~ Dir(y + α), z ~ Mult(z·, θ).
// With z· = y· it is ε-differentially private when
// min α_i >= z· / (e^ε - 1).

#ifndef DPSYNTH_DIRICHLET_MULT_H_
#define DPSYNTH_DIRICHLET_MULT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dpsynth/rng.h"
#include "dpsynth/types.h"

namespace dpsynth {

struct MdCalibration {
  double epsilon = 0.0;
  int64_t z_total = 0;
  // Every α_i must be at least this large.
  double alpha_min = 0.0;
};

// alpha_min = z· / (e^ε - 1), returned unrounded.
MdCalibration CalibrateMd(double epsilon, int64_t z_total);

// Certified budget of a multinomial-Dirichlet prior: ln((z· + min α) / min α).
double MdEpsilonFor(std::span<const double> alpha, int64_t z_total);

// Draws one synthetic dataset with z· = y·.
SyntheticDataset MdSynthesize(const CountDataset& data, const PriorSpec& prior,
                              RngStream& rng);

// ln p(z | y, α), the collapsed posterior predictive. Requires matching
// lengths and Σz = Σy (UsageError otherwise).
double MdLogPmf(std::span<const int64_t> z, std::span<const int64_t> y,
                std::span<const double> alpha);

// ln p(z | y, α) - ln p(z | x, α) for neighbouring y and x (one event moved
// between two groups). Only the two changed groups contribute; the Γ terms
// cancel to two rational factors. Throws UsageError if x and y are not
// neighbours.
double MdLogRatio(std::span<const int64_t> z, std::span<const int64_t> y,
                  std::span<const int64_t> x, std::span<const double> alpha);

// E[z_i | y, α] = (y_i + α_i) / Σ_j (y_j + α_j) · z·.
std::vector<double> MdExpectedCounts(std::span<const int64_t> y,
                                     std::span<const double> alpha, int64_t z_total);

}  // namespace dpsynth

#endif  // DPSYNTH_DIRICHLET_MULT_H_
