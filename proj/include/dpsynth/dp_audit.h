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

#ifndef DPSYNTH_DP_AUDIT_H_
#define DPSYNTH_DP_AUDIT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/poisson_gamma.h"
#include "dpsynth/rng.h"
#include "dpsynth/types.h"

namespace dpsynth {

struct NeighborPair {
  CountPair y;
  CountPair x;
};

// All ordered neighbour pairs of two-group datasets with the given total.
std::vector<NeighborPair> EnumerateNeighbors(int64_t y_total);

// kPg2Exact evaluates ratios in exact rational arithmetic and needs integer a.
enum class AuditMechanism { kMd, kPg2, kPg2Exact };

const char* AuditMechanismName(AuditMechanism m);

struct AuditWitness {
  CountPair y{};
  CountPair x{};
  CountPair z{};
};

struct AuditReport {
  AuditMechanism mechanism = AuditMechanism::kMd;
  double epsilon_target = 0.0;
  double max_abs_log_ratio = 0.0;
  AuditWitness witness;
  bool satisfied = false;
  int64_t instances_checked = 0;
  // Largest disagreement between the pmf-difference and cancelled forms.
  double max_route_gap = 0.0;
  bool routes_agree = true;
};

inline constexpr int64_t kAuditEnumerationCap = 12;
inline constexpr double kAuditTolerance = 1e-9;
inline constexpr double kRouteTolerance = 1e-10;

// |ln p(z | y) - ln p(z | x)| for the mechanism, using the cancelled form (or
// exact arithmetic for kPg2Exact).
double AuditLogRatio(AuditMechanism mechanism, const PriorSpec& prior, const Pair& populations,
                     const AuditWitness& at);

AuditReport AuditSynthesizer(AuditMechanism mechanism, const PriorSpec& prior,
                             const Pair& populations, double epsilon, int64_t y_total);

// Same audit over an explicit neighbour ordering.
AuditReport AuditSynthesizer(AuditMechanism mechanism, const PriorSpec& prior,
                             const Pair& populations, double epsilon, int64_t y_total,
                             std::span<const NeighborPair> order);

// Random (y, x, z) checks for totals beyond the enumeration cap. Each sampled
// pair is also checked at both boundary allocations.
AuditReport SpotCheckSynthesizer(AuditMechanism mechanism, const PriorSpec& prior,
                                 const Pair& populations, double epsilon, int64_t y_total,
                                 int64_t samples, RngStream& rng);

// Total variation between the exact two-group pmf and the empirical
// distribution of `draws` releases from `strategy`.
double StrategyTotalVariation(const CountDataset& data, const PriorSpec& prior,
                              Strategy strategy, int64_t draws, RngStream& rng);

struct BoundInstance {
  CountPair y{};
  Pair a{};
  int64_t r_num = 1;  // r_1 = r_num / r_den
  int64_t r_den = 1;
};

struct BoundAccuracyRow {
  BoundInstance instance;
  size_t donor = 0;
  double exact_log_ratio_c = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool exact_path = false;
  bool skipped = false;
  std::string skip_reason;
};

struct SlackSummary {
  int64_t rows = 0;
  int64_t skipped = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

std::vector<BoundAccuracyRow> BoundAccuracySweep(std::span<const BoundInstance> grid);

SlackSummary SummarizeSlack(std::span<const BoundAccuracyRow> rows);

// y_total 1..max_total, integer a in 1..max_a, r_1 in {1/3, 1/2, 1, 3/2}.
std::vector<BoundInstance> DefaultBoundGrid(int64_t max_total = 8, int64_t max_a = 4);

}  // namespace dpsynth

#endif  // DPSYNTH_DP_AUDIT_H_
