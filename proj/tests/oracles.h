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

// Independent reference computations used only by the tests.

#ifndef DPSYNTH_TESTS_ORACLES_H_
#define DPSYNTH_TESTS_ORACLES_H_

#include <array>
#include <cstdint>
#include <vector>

namespace dpsynth::oracle {

// ln Γ(x) to 200 bits via MPFR, rounded to double.
double LogGamma(double x);

// P(Z = z) for Z | λ ~ Poisson(nλ), λ ~ Gamma(shape, rate), by composite
// Simpson quadrature over λ.
double PoissonGammaMixturePmf(int64_t z, double shape, double rate, double n);

// Two-group constrained pmf by direct long-double summation of the terms
// Γ(z+c1)/z! Γ(z·-z+c2)/(z·-z)! r1^z.
std::vector<double> ConstrainedPmf2(double c1, double c2, double r1, int64_t z_total);

// Multinomial-Dirichlet pmf over z1 = 0..z· for two groups, from binomial and
// beta functions in long double.
std::vector<double> MdPmf2(const std::array<int64_t, 2>& y, const std::array<double, 2>& alpha,
                           int64_t z_total);

// max |ln p(z|y) - ln p(z|x)| over every two-group neighbour pair and z,
// brute force from MdPmf2.
double MdWorstLogRatio(const std::array<double, 2>& alpha, int64_t total);

}  // namespace dpsynth::oracle

#endif  // DPSYNTH_TESTS_ORACLES_H_
