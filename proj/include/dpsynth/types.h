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

#ifndef DPSYNTH_TYPES_H_
#define DPSYNTH_TYPES_H_

#include <cstdint>
#include <string>
#include <vector>

namespace dpsynth {

// Restricted-use counts: y_i events out of a population n_i for each group.
// Construct through Create(), which enforces the invariants.
struct CountDataset {
  std::vector<int64_t> counts;
  std::vector<double> populations;
  std::vector<std::string> group_ids;
  std::vector<std::string> state_ids;
  int64_t total = 0;

  // Missing group ids default to "g1", "g2", ...; state ids may be left
  // empty (has_states() is then false).
  static CountDataset Create(std::vector<int64_t> counts,
                             std::vector<double> populations,
                             std::vector<std::string> group_ids = {},
                             std::vector<std::string> state_ids = {});

  size_t size() const { return counts.size(); }
  bool has_states() const { return !state_ids.empty(); }
  double population_total() const;

  // Throws UsageError / DomainError describing the first violated invariant.
  void Validate() const;

  bool operator==(const CountDataset&) const = default;
};

enum class PriorMode { kMultinomialDirichlet, kPoissonGamma };

struct PriorSpec {
  PriorMode mode = PriorMode::kMultinomialDirichlet;
  std::vector<double> alpha;
  std::vector<double> a;
  std::vector<double> b;
  // Prior mean rates a_i / b_i, recorded when b was derived from them.
  std::vector<double> target_rates;

  static PriorSpec MultinomialDirichlet(std::vector<double> alpha);
  static PriorSpec PoissonGamma(std::vector<double> a, std::vector<double> b);
  // b_i = a_i / rate_i.
  static PriorSpec PoissonGammaFromTargets(std::vector<double> a,
                                           std::vector<double> target_rates);

  // Checks the mode-specific invariants for `groups` groups.
  void Validate(size_t groups) const;
};

enum class Strategy { kPosteriorMultinomial, kExactEnumeration2, kLambdaThenMultinomial };

const char* StrategyName(Strategy s);

struct Provenance {
  std::string method;
  // Certified budget implied by the prior that produced the release.
  double epsilon = 0.0;
  uint64_t seed = 0;
  uint64_t stream_id = 0;
  Strategy strategy = Strategy::kPosteriorMultinomial;
};

struct SyntheticDataset {
  std::vector<int64_t> counts;
  int64_t total = 0;
  Provenance provenance;
};

}  // namespace dpsynth

#endif  // DPSYNTH_TYPES_H_
