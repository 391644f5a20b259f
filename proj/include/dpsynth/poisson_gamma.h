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

// Poisson-gamma synthesizer.
//
//   y_i | λ_i ~ Pois(n_i λ_i),   λ_i ~ Gam(a_i, b_i)
//   λ_i | y_i ~ Gam(y_i + a_i, n_i + b_i)
//   z_i | y_i ~ NegBin(y_i + a_i, n_i / (b_i + 2 n_i))
//
// Releases condition on Σ z_i = z· (= y·). For two groups the conditional
// pmf is available exactly; its normaliser C(y, n, a, b, z·) is a sum over
// the z· + 1 allocations, and the calibration of a_i against ε goes through
// the bound on C(x)/C(y) for neighbouring data and the penalty ν_i.

#ifndef DPSYNTH_POISSON_GAMMA_H_
#define DPSYNTH_POISSON_GAMMA_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dpsynth/rng.h"
#include "dpsynth/types.h"

namespace dpsynth {

using Pair = std::array<double, 2>;
using CountPair = std::array<int64_t, 2>;

struct PgPosterior {
  double shape;
  double rate;
  double mean() const { return shape / rate; }
};

PgPosterior PgPosteriorFor(int64_t y, double a, double b, double n);

struct NegBinParams {
  double r;
  double p;
};

// r = y + a, p = n / (b + 2n) (always < 1/2).
NegBinParams PgPredictiveParams(int64_t y, double a, double b, double n);

// r_i(n, b) = (b_(i)/n_(i) + 2) / (b_i/n_i + 2), where (i) is the complement
// of group i with n_(i) = Σ_{j≠i} n_j and b_(i) = Σ_{j≠i} b_j.
double RRatio(size_t i, std::span<const double> n, std::span<const double> b);

// ν = (z· max(1 - r, 0) + a_(i) + y· - 1) / (a_(i) + y· - 1), where
// a_complement = a_(i). Requires a_(i) + y· - 1 > 0.
double NuPenalty(double a_complement, int64_t y_total, int64_t z_total, double r);

// ln C(y, n, a, b, z·) = ln Σ_{z=0}^{z·} Γ(z+y1+a1)/z! · Γ(z·-z+y2+a2)/(z·-z)! · r1^z
// with r1 = r_1(n, b). Finite for every valid input.
double LogC(const CountPair& y, const Pair& n, const Pair& a, const Pair& b,
            int64_t z_total);
// Same sum with the ratio r1 given directly.
double LogCWithRatio(const CountPair& y, const Pair& a, double r1, int64_t z_total);

// ln p(z1, z· - z1 | y, a, b, n, z·) for two groups. Throws DomainError when
// z1 is outside [0, z·].
double PgConditionalLogPmf2(int64_t z1, const CountPair& y, const Pair& a, const Pair& b,
                            const Pair& n, int64_t z_total);
double PgConditionalLogPmf2WithRatio(int64_t z1, const CountPair& y, const Pair& a,
                                     double r1, int64_t z_total);

// Full pmf over z1 = 0..z·.
std::vector<double> PgConditionalPmf2(const CountPair& y, const Pair& a, double r1,
                                      int64_t z_total);

// Upper bound on |ln C(x)/C(y)| when one event moves out of `donor`:
// |ln((z· max(1 - r_donor, 0) + a_r + y_r) / (a_d + y_d - 1))|.
// Requires a_d + y_d < a_r + y_r and a_d + y_d > 1 (UsageError otherwise).
double Theorem1Bound(const CountPair& y, const Pair& a, double r_donor, int64_t z_total,
                     size_t donor);

// How the prior mean rates a_i/b_i are chosen.
enum class TargetRule { kDefaultNational, kStateAverage, kCustom };

const char* TargetRuleName(TargetRule rule);

// y· / n· for every group.
std::vector<double> NationalTargetRates(const CountDataset& data);

// Crude rate of each group's state, floored at floor_events / n_state so the
// derived b stays finite. Throws UsageError without state labels.
std::vector<double> StateAverageRates(const CountDataset& data, double floor_events = 0.1);

struct PgCalibration {
  double epsilon = 0.0;
  int64_t z_total = 0;
  int64_t y_total = 0;
  TargetRule rule = TargetRule::kDefaultNational;
  std::vector<double> target_rates;
  std::vector<double> a_min;
  std::vector<double> b;
  std::vector<double> nu;
  std::vector<double> r;
  int iterations = 0;
  bool converged = false;

  PriorSpec ToPrior() const;
};

// Solves a_i = z· / (e^ε/ν_i - 1) jointly with b_i = a_i/λ0_i, r_i(n, b) and
// ν_i (evaluated at min_i r_i) by Gauss-Seidel sweeps. Target rates default
// from `rule` when `target_rates` is empty. Throws InfeasibleBudgetError if
// e^ε <= ν_i at any iterate.
PgCalibration CalibratePg(double epsilon, const CountDataset& data,
                          std::span<const double> target_rates, TargetRule rule);

// Certified budget of a Poisson-gamma prior on these populations:
// max_i ln(ν_i (z· + a_i) / a_i).
double PgEpsilonFor(std::span<const double> a, std::span<const double> b,
                    std::span<const double> n, int64_t y_total);

// Draws one synthetic dataset with z· = y·. kExactEnumeration2 requires two
// groups; kLambdaThenMultinomial works for any count.
SyntheticDataset PgSynthesize(const CountDataset& data, const PriorSpec& prior,
                              Strategy strategy, RngStream& rng);

// n_i (y_i + a_i) / (n_i + b_i).
std::vector<double> PgExpectedCounts(std::span<const int64_t> y, std::span<const double> a,
                                     std::span<const double> b, std::span<const double> n);

// Noisy state crude rates (Σ_s y + e_s) / Σ_s n with e_s ~ Laplace(1/noise_epsilon),
// floored at floor_events / Σ_s n, expanded to one rate per group.
std::vector<double> SanitizeStateRates(const CountDataset& data, double noise_epsilon,
                                       RngStream& rng, double floor_events = 0.1);

}  // namespace dpsynth

#endif  // DPSYNTH_POISSON_GAMMA_H_
