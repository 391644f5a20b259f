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

#include "dpsynth/types.h"

#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "dpsynth/errors.h"

namespace dpsynth {

CountDataset CountDataset::Create(std::vector<int64_t> counts,
                                  std::vector<double> populations,
                                  std::vector<std::string> group_ids,
                                  std::vector<std::string> state_ids) {
  CountDataset d;
  d.counts = std::move(counts);
  d.populations = std::move(populations);
  d.group_ids = std::move(group_ids);
  d.state_ids = std::move(state_ids);
  if (d.group_ids.empty()) {
    for (size_t i = 0; i < d.counts.size(); ++i) {
      d.group_ids.push_back("g" + std::to_string(i + 1));
    }
  }
  d.total = std::accumulate(d.counts.begin(), d.counts.end(), int64_t{0});
  d.Validate();
  return d;
}

double CountDataset::population_total() const {
  return std::accumulate(populations.begin(), populations.end(), 0.0);
}

void CountDataset::Validate() const {
  const size_t groups = counts.size();
  if (groups < 2) throw UsageError("dataset needs at least two groups");
  if (populations.size() != groups || group_ids.size() != groups ||
      (!state_ids.empty() && state_ids.size() != groups)) {
    throw UsageError("dataset vectors have mismatched lengths");
  }
  int64_t sum = 0;
  for (size_t i = 0; i < groups; ++i) {
    if (counts[i] < 0) {
      throw DomainError("negative count for group " + group_ids[i]);
    }
    if (!(populations[i] > 0.0) || !std::isfinite(populations[i])) {
      throw DomainError("non-positive population for group " + group_ids[i]);
    }
    sum += counts[i];
  }
  if (sum != total) throw UsageError("dataset total does not match counts");
  std::set<std::string> seen(group_ids.begin(), group_ids.end());
  if (seen.size() != groups) throw UsageError("duplicate group ids");
}

PriorSpec PriorSpec::MultinomialDirichlet(std::vector<double> alpha) {
  PriorSpec p;
  p.mode = PriorMode::kMultinomialDirichlet;
  p.alpha = std::move(alpha);
  p.Validate(p.alpha.size());
  return p;
}

PriorSpec PriorSpec::PoissonGamma(std::vector<double> a, std::vector<double> b) {
  PriorSpec p;
  p.mode = PriorMode::kPoissonGamma;
  p.a = std::move(a);
  p.b = std::move(b);
  p.Validate(p.a.size());
  return p;
}

PriorSpec PriorSpec::PoissonGammaFromTargets(std::vector<double> a,
                                             std::vector<double> target_rates) {
  if (a.size() != target_rates.size()) {
    throw UsageError("a and target rates have different lengths");
  }
  PriorSpec p;
  p.mode = PriorMode::kPoissonGamma;
  p.b.resize(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (!(target_rates[i] > 0.0)) throw DomainError("target rate must be positive");
    p.b[i] = a[i] / target_rates[i];
  }
  p.a = std::move(a);
  p.target_rates = std::move(target_rates);
  p.Validate(p.a.size());
  return p;
}

namespace {
void RequirePositive(const std::vector<double>& v, const char* name) {
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw DomainError(std::string(name) + " entries must be positive and finite");
    }
  }
}
}  // namespace

void PriorSpec::Validate(size_t groups) const {
  if (mode == PriorMode::kMultinomialDirichlet) {
    if (alpha.size() != groups) throw UsageError("alpha length does not match groups");
    RequirePositive(alpha, "alpha");
    return;
  }
  if (a.size() != groups || b.size() != groups) {
    throw UsageError("a/b lengths do not match groups");
  }
  RequirePositive(a, "a");
  RequirePositive(b, "b");
  if (!target_rates.empty()) {
    if (target_rates.size() != groups) throw UsageError("target rate length mismatch");
    for (size_t i = 0; i < groups; ++i) {
      if (b[i] != a[i] / target_rates[i]) {
        throw UsageError("b is not a / target_rate");
      }
    }
  }
}

const char* StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kPosteriorMultinomial:
      return "posterior-multinomial";
    case Strategy::kExactEnumeration2:
      return "exact-enumeration-2";
    case Strategy::kLambdaThenMultinomial:
      return "lambda-then-multinomial";
  }
  return "unknown";
}

}  // namespace dpsynth
