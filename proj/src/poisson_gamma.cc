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

#include "dpsynth/poisson_gamma.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "dpsynth/errors.h"
#include "dpsynth/kernels.h"
#include "dpsynth/special_functions.h"

namespace dpsynth {
namespace {

void RequirePositive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

// ln[Γ(z+c1)/z! · Γ(z·-z+c2)/(z·-z)! · r1^z] for z = 0..z·.
std::vector<double> LogTerms(double c1, double c2, double r1, int64_t z_total) {
  RequirePositive(c1, "y1 + a1");
  RequirePositive(c2, "y2 + a2");
  if (!(r1 >= 0.0) || !std::isfinite(r1)) throw DomainError("r1 must be finite and >= 0");
  if (z_total < 0) throw DomainError("z_total must be non-negative");
  const double log_r1 = r1 > 0.0 ? std::log(r1) : 0.0;
  const int64_t last = r1 > 0.0 ? z_total : 0;
  std::vector<double> terms(static_cast<size_t>(z_total) + 1,
                            -std::numeric_limits<double>::infinity());
  for (int64_t z = 0; z <= last; ++z) {
    const int64_t rest = z_total - z;
    terms[static_cast<size_t>(z)] =
        LogGamma(static_cast<double>(z) + c1) - LogFactorial(z) +
        LogGamma(static_cast<double>(rest) + c2) - LogFactorial(rest) +
        static_cast<double>(z) * log_r1;
  }
  return terms;
}

double Complement(std::span<const double> v, size_t i) {
  double s = 0.0;
  for (size_t j = 0; j < v.size(); ++j) {
    if (j != i) s += v[j];
  }
  return s;
}

std::vector<double> AllRatios(std::span<const double> n, std::span<const double> b) {
  // Complement sums via totals keep this O(I) for large I.
  const double n_total = kernels::Sum(n);
  const double b_total = kernels::Sum(b);
  std::vector<double> r(n.size());
  for (size_t i = 0; i < n.size(); ++i) {
    const double nc = n_total - n[i];
    const double bc = b_total - b[i];
    r[i] = (bc / nc + 2.0) / (b[i] / n[i] + 2.0);
  }
  return r;
}

// Expands per-state totals into a per-group rate vector.
template <typename RateFn>
std::vector<double> PerStateRates(const CountDataset& data, RateFn rate_for_state) {
  if (!data.has_states()) throw UsageError("dataset has no state labels");
  std::map<std::string, size_t> index;
  std::vector<double> events;
  std::vector<double> people;
  std::vector<size_t> state_of(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    auto [it, inserted] = index.emplace(data.state_ids[i], events.size());
    if (inserted) {
      events.push_back(0.0);
      people.push_back(0.0);
    }
    state_of[i] = it->second;
    events[it->second] += static_cast<double>(data.counts[i]);
    people[it->second] += data.populations[i];
  }
  std::vector<double> state_rate(events.size());
  for (size_t s = 0; s < events.size(); ++s) state_rate[s] = rate_for_state(events[s], people[s]);
  std::vector<double> out(data.size());
  for (size_t i = 0; i < data.size(); ++i) out[i] = state_rate[state_of[i]];
  return out;
}

}  // namespace

PgPosterior PgPosteriorFor(int64_t y, double a, double b, double n) {
  if (y < 0) throw DomainError("count must be non-negative");
  RequirePositive(a, "a");
  RequirePositive(b, "b");
  RequirePositive(n, "n");
  return {static_cast<double>(y) + a, n + b};
}

NegBinParams PgPredictiveParams(int64_t y, double a, double b, double n) {
  const PgPosterior post = PgPosteriorFor(y, a, b, n);
  return {post.shape, n / (b + 2.0 * n)};
}

double RRatio(size_t i, std::span<const double> n, std::span<const double> b) {
  if (n.size() != b.size() || n.size() < 2) {
    throw UsageError("n and b must have the same length >= 2");
  }
  if (i >= n.size()) throw UsageError("group index out of range");
  for (size_t j = 0; j < n.size(); ++j) {
    RequirePositive(n[j], "n");
    RequirePositive(b[j], "b");
  }
  return (Complement(b, i) / Complement(n, i) + 2.0) / (b[i] / n[i] + 2.0);
}

double NuPenalty(double a_complement, int64_t y_total, int64_t z_total, double r) {
  const double base = a_complement + static_cast<double>(y_total) - 1.0;
  if (!(base > 0.0)) throw DomainError("a_(i) + y_total - 1 must be positive");
  return (static_cast<double>(z_total) * std::max(1.0 - r, 0.0) + base) / base;
}

double LogCWithRatio(const CountPair& y, const Pair& a, double r1, int64_t z_total) {
  if (y[0] < 0 || y[1] < 0) throw DomainError("counts must be non-negative");
  const auto terms = LogTerms(static_cast<double>(y[0]) + a[0],
                              static_cast<double>(y[1]) + a[1], r1, z_total);
  return LogSumExp(terms);
}

double LogC(const CountPair& y, const Pair& n, const Pair& a, const Pair& b,
            int64_t z_total) {
  return LogCWithRatio(y, a, RRatio(0, n, b), z_total);
}

double PgConditionalLogPmf2WithRatio(int64_t z1, const CountPair& y, const Pair& a,
                                     double r1, int64_t z_total) {
  if (z1 < 0 || z1 > z_total) throw DomainError("z1 outside [0, z_total]");
  if (y[0] < 0 || y[1] < 0) throw DomainError("counts must be non-negative");
  const auto terms = LogTerms(static_cast<double>(y[0]) + a[0],
                              static_cast<double>(y[1]) + a[1], r1, z_total);
  return terms[static_cast<size_t>(z1)] - LogSumExp(terms);
}

double PgConditionalLogPmf2(int64_t z1, const CountPair& y, const Pair& a, const Pair& b,
                            const Pair& n, int64_t z_total) {
  return PgConditionalLogPmf2WithRatio(z1, y, a, RRatio(0, n, b), z_total);
}

std::vector<double> PgConditionalPmf2(const CountPair& y, const Pair& a, double r1,
                                      int64_t z_total) {
  if (y[0] < 0 || y[1] < 0) throw DomainError("counts must be non-negative");
  auto terms = LogTerms(static_cast<double>(y[0]) + a[0], static_cast<double>(y[1]) + a[1],
                        r1, z_total);
  const double log_c = LogSumExp(terms);
  for (double& t : terms) t = std::exp(t - log_c);
  return terms;
}

double Theorem1Bound(const CountPair& y, const Pair& a, double r_donor, int64_t z_total,
                     size_t donor) {
  if (donor > 1) throw UsageError("donor index must be 0 or 1");
  const size_t receiver = 1 - donor;
  const double donor_mass = a[donor] + static_cast<double>(y[donor]);
  const double receiver_mass = a[receiver] + static_cast<double>(y[receiver]);
  if (!(donor_mass < receiver_mass)) {
    throw UsageError("bound requires a_i + y_i < a_i' + y_i' for the donor i");
  }
  if (!(donor_mass > 1.0)) throw UsageError("bound requires a_i + y_i > 1");
  const double numerator =
      static_cast<double>(z_total) * std::max(1.0 - r_donor, 0.0) + receiver_mass;
  return std::abs(std::log(numerator / (donor_mass - 1.0)));
}

const char* TargetRuleName(TargetRule rule) {
  switch (rule) {
    case TargetRule::kDefaultNational:
      return "national";
    case TargetRule::kStateAverage:
      return "state";
    case TargetRule::kCustom:
      return "custom";
  }
  return "unknown";
}

std::vector<double> NationalTargetRates(const CountDataset& data) {
  if (data.total <= 0) throw DomainError("national rate needs y_total > 0");
  return std::vector<double>(data.size(),
                             static_cast<double>(data.total) / data.population_total());
}

std::vector<double> StateAverageRates(const CountDataset& data, double floor_events) {
  return PerStateRates(data, [&](double events, double people) {
    return std::max(events, floor_events) / people;
  });
}

PriorSpec PgCalibration::ToPrior() const {
  return PriorSpec::PoissonGammaFromTargets(a_min, target_rates);
}

PgCalibration CalibratePg(double epsilon, const CountDataset& data,
                          std::span<const double> target_rates, TargetRule rule) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be positive and finite");
  }
  if (data.total < 1) throw DomainError("calibration needs y_total >= 1");
  const size_t groups = data.size();

  PgCalibration cal;
  cal.epsilon = epsilon;
  cal.z_total = data.total;
  cal.y_total = data.total;
  cal.rule = rule;
  if (!target_rates.empty()) {
    cal.target_rates.assign(target_rates.begin(), target_rates.end());
  } else if (rule == TargetRule::kStateAverage) {
    cal.target_rates = StateAverageRates(data);
  } else if (rule == TargetRule::kDefaultNational) {
    cal.target_rates = NationalTargetRates(data);
  } else {
    throw UsageError("custom target rule needs explicit target rates");
  }
  if (cal.target_rates.size() != groups) throw UsageError("target rate length mismatch");
  for (double t : cal.target_rates) RequirePositive(t, "target rate");

  const double budget = std::exp(epsilon);
  const double z = static_cast<double>(cal.z_total);
  const auto solve_a = [&](double nu) {
    if (!(budget > nu)) {
      throw InfeasibleBudgetError("privacy budget too small: e^eps = " +
                                  std::to_string(budget) + " <= nu = " + std::to_string(nu));
    }
    return z / (budget / nu - 1.0);
  };

  // A start at ν = 2 bounds the penalty from above; for e^ε <= 2 start inside
  // the feasible interval instead.
  const double nu_start = budget > 2.0 ? 2.0 : 0.5 * (1.0 + budget);
  cal.a_min.assign(groups, solve_a(nu_start));
  cal.b.resize(groups);
  double a_sum = kernels::Sum(cal.a_min);

  constexpr int kMaxSweeps = 200;
  constexpr double kTolerance = 1e-10;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    cal.iterations = sweep;
    for (size_t i = 0; i < groups; ++i) cal.b[i] = cal.a_min[i] / cal.target_rates[i];
    const auto r = AllRatios(data.populations, cal.b);
    const double r_min = *std::min_element(r.begin(), r.end());
    double max_change = 0.0;
    for (size_t i = 0; i < groups; ++i) {
      const double nu = NuPenalty(a_sum - cal.a_min[i], cal.y_total, cal.z_total, r_min);
      const double updated = solve_a(nu);
      max_change = std::max(max_change, std::abs(updated - cal.a_min[i]) / updated);
      a_sum += updated - cal.a_min[i];
      cal.a_min[i] = updated;
    }
    if (max_change < kTolerance) {
      cal.converged = true;
      break;
    }
  }

  for (size_t i = 0; i < groups; ++i) cal.b[i] = cal.a_min[i] / cal.target_rates[i];
  cal.r = AllRatios(data.populations, cal.b);
  const double r_min = *std::min_element(cal.r.begin(), cal.r.end());
  a_sum = kernels::Sum(cal.a_min);
  cal.nu.resize(groups);
  for (size_t i = 0; i < groups; ++i) {
    cal.nu[i] = NuPenalty(a_sum - cal.a_min[i], cal.y_total, cal.z_total, r_min);
  }
  return cal;
}

double PgEpsilonFor(std::span<const double> a, std::span<const double> b,
                    std::span<const double> n, int64_t y_total) {
  if (a.size() != b.size() || a.size() != n.size()) throw UsageError("length mismatch");
  const auto r = AllRatios(n, b);
  const double r_min = *std::min_element(r.begin(), r.end());
  const double a_sum = kernels::Sum(a);
  const double z = static_cast<double>(y_total);
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double nu = NuPenalty(a_sum - a[i], y_total, y_total, r_min);
    worst = std::max(worst, std::log(nu) + std::log1p(z / a[i]));
  }
  return worst;
}

SyntheticDataset PgSynthesize(const CountDataset& data, const PriorSpec& prior,
                              Strategy strategy, RngStream& rng) {
  if (prior.mode != PriorMode::kPoissonGamma) {
    throw UsageError("PgSynthesize needs a Poisson-gamma prior");
  }
  prior.Validate(data.size());
  SyntheticDataset out;
  out.total = data.total;
  out.counts.assign(data.size(), 0);
  switch (strategy) {
    case Strategy::kExactEnumeration2: {
      if (data.size() != 2) throw UsageError("exact enumeration needs exactly two groups");
      const double r1 = RRatio(0, data.populations, prior.b);
      const auto pmf = PgConditionalPmf2({data.counts[0], data.counts[1]},
                                         {prior.a[0], prior.a[1]}, r1, data.total);
      const double u = rng.NextUniform();
      double cumulative = 0.0;
      int64_t z1 = data.total;
      for (size_t k = 0; k < pmf.size(); ++k) {
        cumulative += pmf[k];
        if (u <= cumulative) {
          z1 = static_cast<int64_t>(k);
          break;
        }
      }
      out.counts = {z1, data.total - z1};
      break;
    }
    case Strategy::kLambdaThenMultinomial: {
      std::vector<double> weight(data.size());
      for (size_t i = 0; i < data.size(); ++i) {
        const PgPosterior post =
            PgPosteriorFor(data.counts[i], prior.a[i], prior.b[i], data.populations[i]);
        weight[i] = SampleLogGamma(post.shape, rng) - std::log(post.rate) +
                    std::log(data.populations[i]);
      }
      const double m = kernels::Max(weight);
      for (double& w : weight) w = std::exp(w - m);
      const double s = kernels::Sum(weight);
      for (double& w : weight) w /= s;
      out.counts = SampleMultinomial(data.total, weight, rng);
      break;
    }
    case Strategy::kPosteriorMultinomial:
      throw UsageError("strategy not available for the Poisson-gamma synthesizer");
  }
  out.provenance.method = "pg";
  out.provenance.epsilon =
      data.total > 0 ? PgEpsilonFor(prior.a, prior.b, data.populations, data.total) : 0.0;
  out.provenance.seed = rng.seed();
  out.provenance.stream_id = rng.stream_id();
  out.provenance.strategy = strategy;
  return out;
}

std::vector<double> PgExpectedCounts(std::span<const int64_t> y, std::span<const double> a,
                                     std::span<const double> b, std::span<const double> n) {
  if (y.size() != a.size() || a.size() != b.size() || b.size() != n.size()) {
    throw UsageError("length mismatch");
  }
  std::vector<double> out(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    out[i] = n[i] * (static_cast<double>(y[i]) + a[i]) / (n[i] + b[i]);
  }
  return out;
}

std::vector<double> SanitizeStateRates(const CountDataset& data, double noise_epsilon,
                                       RngStream& rng, double floor_events) {
  if (!(noise_epsilon > 0.0)) throw DomainError("noise epsilon must be positive");
  const double scale = std::isinf(noise_epsilon) ? 0.0 : 1.0 / noise_epsilon;
  return PerStateRates(data, [&](double events, double people) {
    const double noisy = events + SampleLaplace(scale, rng);
    return std::max(noisy, floor_events) / people;
  });
}

}  // namespace dpsynth
