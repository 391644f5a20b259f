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

#include "dpsynth/dp_audit.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "dpsynth/dirichlet_mult.h"
#include "dpsynth/errors.h"
#include "dpsynth/exact_math.h"
#include "dpsynth/neighbors.h"

namespace dpsynth {
namespace {

struct RatioRoutes {
  double value;  // reported |log ratio|
  double gap;    // disagreement between the two evaluation routes
};

bool IsInteger(double v) { return std::floor(v) == v; }

bool WitnessLess(const AuditWitness& lhs, const AuditWitness& rhs) {
  return std::tie(lhs.y, lhs.x, lhs.z) < std::tie(rhs.y, rhs.x, rhs.z);
}

void CheckPrior(AuditMechanism mechanism, const PriorSpec& prior, const Pair& populations) {
  prior.Validate(2);
  if (mechanism == AuditMechanism::kMd) {
    if (prior.mode != PriorMode::kMultinomialDirichlet) {
      throw UsageError("md audit needs a multinomial-Dirichlet prior");
    }
    return;
  }
  if (prior.mode != PriorMode::kPoissonGamma) {
    throw UsageError("pg audit needs a Poisson-gamma prior");
  }
  if (!(populations[0] > 0.0) || !(populations[1] > 0.0)) {
    throw DomainError("populations must be positive");
  }
  if (mechanism == AuditMechanism::kPg2Exact &&
      !(IsInteger(prior.a[0]) && IsInteger(prior.a[1]))) {
    throw UsageError("exact pg audit needs integer shape parameters");
  }
}

RatioRoutes Evaluate(AuditMechanism mechanism, const PriorSpec& prior, const Pair& populations,
                     const AuditWitness& at) {
  const int64_t z_total = at.z[0] + at.z[1];
  if (mechanism == AuditMechanism::kMd) {
    const double cancelled = MdLogRatio(at.z, at.y, at.x, prior.alpha);
    const double difference =
        MdLogPmf(at.z, at.y, prior.alpha) - MdLogPmf(at.z, at.x, prior.alpha);
    return {std::abs(cancelled), std::abs(cancelled - difference)};
  }

  const Pair a{prior.a[0], prior.a[1]};
  const double r1 = RRatio(0, populations, prior.b);
  const Transposition t = FindTransposition(at.y, at.x);
  const size_t d = t.donor;
  const size_t r = t.receiver;
  const double donor_term =
      static_cast<double>(at.z[d] + at.y[d]) + a[d] - 1.0;
  const double receiver_term = static_cast<double>(at.z[r] + at.y[r]) + a[r];
  const double cancelled = std::log(donor_term) - std::log(receiver_term) +
                           LogCWithRatio(at.x, a, r1, z_total) -
                           LogCWithRatio(at.y, a, r1, z_total);
  const double difference = PgConditionalLogPmf2WithRatio(at.z[0], at.y, a, r1, z_total) -
                            PgConditionalLogPmf2WithRatio(at.z[0], at.x, a, r1, z_total);
  if (mechanism == AuditMechanism::kPg2) {
    return {std::abs(cancelled), std::abs(cancelled - difference)};
  }

  const std::array<int64_t, 2> ia{static_cast<int64_t>(a[0]), static_cast<int64_t>(a[1])};
  const mpq_class exact_r1(r1);  // exact binary value of the double
  mpq_class ratio(mpz_class(at.z[d] + at.y[d] + ia[d] - 1), mpz_class(at.z[r] + at.y[r] + ia[r]));
  ratio.canonicalize();
  ratio *= ExactC(at.x, ia, exact_r1, z_total) / ExactC(at.y, ia, exact_r1, z_total);
  const double exact = LogRational(ratio);
  return {std::abs(exact), std::max(std::abs(exact - cancelled), std::abs(exact - difference))};
}

void Record(AuditReport& report, const AuditWitness& at, const RatioRoutes& routes) {
  ++report.instances_checked;
  report.max_route_gap = std::max(report.max_route_gap, routes.gap);
  const bool first = report.instances_checked == 1;
  if (first || routes.value > report.max_abs_log_ratio ||
      (routes.value == report.max_abs_log_ratio && WitnessLess(at, report.witness))) {
    report.max_abs_log_ratio = routes.value;
    report.witness = at;
  }
}

void Finish(AuditReport& report) {
  report.satisfied = report.max_abs_log_ratio <= report.epsilon_target + kAuditTolerance;
  report.routes_agree = report.max_route_gap <= kRouteTolerance;
}

}  // namespace

std::vector<NeighborPair> EnumerateNeighbors(int64_t y_total) {
  if (y_total < 1) throw DomainError("y_total must be at least 1");
  std::vector<NeighborPair> out;
  for (int64_t y1 = y_total; y1 >= 0; --y1) {
    const CountPair y{y1, y_total - y1};
    if (y[0] >= 1) out.push_back({y, {y[0] - 1, y[1] + 1}});
    if (y[1] >= 1) out.push_back({y, {y[0] + 1, y[1] - 1}});
  }
  return out;
}

const char* AuditMechanismName(AuditMechanism m) {
  switch (m) {
    case AuditMechanism::kMd:
      return "md";
    case AuditMechanism::kPg2:
      return "pg2";
    case AuditMechanism::kPg2Exact:
      return "pg2-exact";
  }
  return "unknown";
}

double AuditLogRatio(AuditMechanism mechanism, const PriorSpec& prior, const Pair& populations,
                     const AuditWitness& at) {
  CheckPrior(mechanism, prior, populations);
  return Evaluate(mechanism, prior, populations, at).value;
}

AuditReport AuditSynthesizer(AuditMechanism mechanism, const PriorSpec& prior,
                             const Pair& populations, double epsilon, int64_t y_total) {
  const auto order = EnumerateNeighbors(y_total);
  return AuditSynthesizer(mechanism, prior, populations, epsilon, y_total, order);
}

AuditReport AuditSynthesizer(AuditMechanism mechanism, const PriorSpec& prior,
                             const Pair& populations, double epsilon, int64_t y_total,
                             std::span<const NeighborPair> order) {
  if (y_total > kAuditEnumerationCap) {
    throw UsageError("exhaustive audit is capped at y_total = " +
                     std::to_string(kAuditEnumerationCap));
  }
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  CheckPrior(mechanism, prior, populations);
  AuditReport report;
  report.mechanism = mechanism;
  report.epsilon_target = epsilon;
  for (const NeighborPair& pair : order) {
    if (pair.y[0] + pair.y[1] != y_total || pair.x[0] + pair.x[1] != y_total) {
      throw UsageError("neighbour pair does not match y_total");
    }
    for (int64_t z1 = 0; z1 <= y_total; ++z1) {
      const AuditWitness at{pair.y, pair.x, {z1, y_total - z1}};
      Record(report, at, Evaluate(mechanism, prior, populations, at));
    }
  }
  Finish(report);
  return report;
}

AuditReport SpotCheckSynthesizer(AuditMechanism mechanism, const PriorSpec& prior,
                                 const Pair& populations, double epsilon, int64_t y_total,
                                 int64_t samples, RngStream& rng) {
  if (y_total < 1) throw DomainError("y_total must be at least 1");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  CheckPrior(mechanism, prior, populations);
  AuditReport report;
  report.mechanism = mechanism;
  report.epsilon_target = epsilon;
  const auto uniform_int = [&](int64_t hi) {  // 0..hi inclusive
    return static_cast<int64_t>(rng.NextU64() % static_cast<uint64_t>(hi + 1));
  };
  for (int64_t s = 0; s < samples; ++s) {
    const int64_t y1 = uniform_int(y_total);
    const CountPair y{y1, y_total - y1};
    CountPair x = y;
    bool move_from_first = y[0] >= 1;
    if (y[0] >= 1 && y[1] >= 1) move_from_first = (rng.NextU64() & 1) == 0;
    if (move_from_first) {
      x = {y[0] - 1, y[1] + 1};
    } else {
      x = {y[0] + 1, y[1] - 1};
    }
    const int64_t z1 = uniform_int(y_total);
    for (int64_t z_first : {int64_t{0}, y_total, z1}) {
      const CountPair z{z_first, y_total - z_first};
      for (const AuditWitness& at : {AuditWitness{y, x, z}, AuditWitness{x, y, z}}) {
        Record(report, at, Evaluate(mechanism, prior, populations, at));
      }
    }
  }
  Finish(report);
  return report;
}

double StrategyTotalVariation(const CountDataset& data, const PriorSpec& prior,
                              Strategy strategy, int64_t draws, RngStream& rng) {
  if (data.size() != 2) throw UsageError("total variation check needs two groups");
  if (draws < 1) throw UsageError("draws must be positive");
  prior.Validate(2);
  const double r1 = RRatio(0, data.populations, prior.b);
  const auto pmf = PgConditionalPmf2({data.counts[0], data.counts[1]}, {prior.a[0], prior.a[1]},
                                     r1, data.total);
  std::vector<double> freq(pmf.size(), 0.0);
  for (int64_t k = 0; k < draws; ++k) {
    const SyntheticDataset z = PgSynthesize(data, prior, strategy, rng);
    freq[static_cast<size_t>(z.counts[0])] += 1.0;
  }
  double tv = 0.0;
  for (size_t k = 0; k < pmf.size(); ++k) {
    tv += std::abs(freq[k] / static_cast<double>(draws) - pmf[k]);
  }
  return 0.5 * tv;
}

std::vector<BoundAccuracyRow> BoundAccuracySweep(std::span<const BoundInstance> grid) {
  std::vector<BoundAccuracyRow> rows;
  rows.reserve(grid.size());
  for (const BoundInstance& inst : grid) {
    BoundAccuracyRow row;
    row.instance = inst;
    if (inst.r_num <= 0 || inst.r_den <= 0) throw DomainError("r must be a positive ratio");
    const int64_t z_total = inst.y[0] + inst.y[1];
    const double s0 = static_cast<double>(inst.y[0]) + inst.a[0];
    const double s1 = static_cast<double>(inst.y[1]) + inst.a[1];
    if (s0 == s1) {
      row.skipped = true;
      row.skip_reason = "a_1 + y_1 equals a_2 + y_2";
      rows.push_back(row);
      continue;
    }
    row.donor = s0 < s1 ? 0 : 1;
    const size_t d = row.donor;
    if (inst.y[d] < 1) {
      row.skipped = true;
      row.skip_reason = "donor count is zero";
      rows.push_back(row);
      continue;
    }
    if (!(std::min(s0, s1) > 1.0)) {
      row.skipped = true;
      row.skip_reason = "a_i + y_i <= 1";
      rows.push_back(row);
      continue;
    }
    CountPair x = inst.y;
    x[d] -= 1;
    x[1 - d] += 1;
    const double r1 = static_cast<double>(inst.r_num) / static_cast<double>(inst.r_den);
    const double r_donor = d == 0 ? r1
                                  : static_cast<double>(inst.r_den) /
                                        static_cast<double>(inst.r_num);
    row.bound = Theorem1Bound(inst.y, inst.a, r_donor, z_total, d);
    if (IsInteger(inst.a[0]) && IsInteger(inst.a[1])) {
      const std::array<int64_t, 2> ia{static_cast<int64_t>(inst.a[0]),
                                      static_cast<int64_t>(inst.a[1])};
      mpq_class r_exact(mpz_class(inst.r_num), mpz_class(inst.r_den));
      r_exact.canonicalize();
      row.exact_log_ratio_c =
          LogRational(ExactC(x, ia, r_exact, z_total) / ExactC(inst.y, ia, r_exact, z_total));
      row.exact_path = true;
    } else {
      row.exact_log_ratio_c =
          LogCWithRatio(x, inst.a, r1, z_total) - LogCWithRatio(inst.y, inst.a, r1, z_total);
    }
    row.slack = row.bound - std::abs(row.exact_log_ratio_c);
    rows.push_back(row);
  }
  return rows;
}

SlackSummary SummarizeSlack(std::span<const BoundAccuracyRow> rows) {
  SlackSummary summary;
  std::vector<double> slack;
  for (const auto& row : rows) {
    if (row.skipped) {
      ++summary.skipped;
    } else {
      slack.push_back(row.slack);
    }
  }
  summary.rows = static_cast<int64_t>(slack.size());
  if (slack.empty()) return summary;
  std::sort(slack.begin(), slack.end());
  summary.min = slack.front();
  summary.max = slack.back();
  const size_t mid = slack.size() / 2;
  summary.median = slack.size() % 2 == 1 ? slack[mid] : 0.5 * (slack[mid - 1] + slack[mid]);
  return summary;
}

std::vector<BoundInstance> DefaultBoundGrid(int64_t max_total, int64_t max_a) {
  static constexpr int64_t kRatios[][2] = {{1, 3}, {1, 2}, {1, 1}, {3, 2}};
  std::vector<BoundInstance> grid;
  for (int64_t total = 1; total <= max_total; ++total) {
    for (int64_t y1 = 0; y1 <= total; ++y1) {
      for (int64_t a1 = 1; a1 <= max_a; ++a1) {
        for (int64_t a2 = 1; a2 <= max_a; ++a2) {
          for (const auto& r : kRatios) {
            grid.push_back({{y1, total - y1},
                            {static_cast<double>(a1), static_cast<double>(a2)},
                            r[0],
                            r[1]});
          }
        }
      }
    }
  }
  return grid;
}

}  // namespace dpsynth
