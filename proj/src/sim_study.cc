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

#include "dpsynth/sim_study.h"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "dpsynth/dirichlet_mult.h"
#include "dpsynth/errors.h"
#include "dpsynth/kernels.h"
#include "dpsynth/poisson_gamma.h"

namespace dpsynth {
namespace {

constexpr uint64_t kTagPopulation = 1;
constexpr uint64_t kTagRate = 2;
constexpr uint64_t kTagData = 3;
constexpr uint64_t kTagMethod = 4;
constexpr StudyMethod kMethods[] = {StudyMethod::kMd, StudyMethod::kPgNational,
                                    StudyMethod::kPgState};

std::vector<bool> TopQuintile(std::span<const double> n) {
  std::vector<size_t> order(n.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) { return n[i] > n[j]; });
  const size_t count =
      std::clamp<size_t>((n.size() + 2) / 5, 1, n.size() > 1 ? n.size() - 1 : 1);
  std::vector<bool> urban(n.size(), false);
  for (size_t k = 0; k < count; ++k) urban[order[k]] = true;
  return urban;
}

double WeightedRate(std::span<const double> est, std::span<const double> n,
                    const std::vector<bool>& pick, bool want) {
  double events = 0.0;
  double people = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    if (pick[i] != want) continue;
    events += est[i] * n[i];
    people += n[i];
  }
  return people > 0.0 ? events / people : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> TrueStateRates(const Truth& truth) {
  const size_t states = truth.state_index.empty()
                            ? 0
                            : *std::max_element(truth.state_index.begin(),
                                                truth.state_index.end()) + 1;
  std::vector<double> events(states, 0.0);
  std::vector<double> people(states, 0.0);
  for (size_t i = 0; i < truth.n.size(); ++i) {
    events[truth.state_index[i]] += truth.n[i] * truth.lambda[i];
    people[truth.state_index[i]] += truth.n[i];
  }
  std::vector<double> out(truth.n.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = events[truth.state_index[i]] / people[truth.state_index[i]];
  }
  return out;
}

struct ReplicateMetrics {
  bool feasible = true;
  std::string note;
  double rmse = 0.0;
  double urban = 0.0;
  double rural = 0.0;
  double contrast = 0.0;
};

MetricSummary Summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.lo = Percentile(values, 0.025);
  s.hi = Percentile(values, 0.975);
  return s;
}

}  // namespace

Scenario Scenario::Named(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "uniform") {
  } else if (name == "heterogeneous-n") {
    s.pop_mode = PopMode::kHeterogeneous;
  } else if (name == "heterogeneous-rate") {
    s.rate_mode = RateMode::kHeterogeneous;
  } else if (name == "heterogeneous-both") {
    s.pop_mode = PopMode::kHeterogeneous;
    s.rate_mode = RateMode::kHeterogeneous;
  } else {
    throw UsageError("unknown scenario: " + name);
  }
  return s;
}

std::vector<std::string> ScenarioNames() {
  return {"uniform", "heterogeneous-n", "heterogeneous-rate", "heterogeneous-both"};
}

Truth GenTruth(const Scenario& input) {
  Scenario scenario = input;
  if (!scenario.populations.empty()) {
    scenario.groups = static_cast<int64_t>(scenario.populations.size());
    scenario.n_total = kernels::Sum(scenario.populations);
  }
  if (scenario.groups < 2) throw DomainError("need at least two groups");
  if (scenario.y_total < 1) throw DomainError("y_total must be at least 1");
  if (!(scenario.n_total > 0.0)) throw DomainError("n_total must be positive");
  const size_t groups = static_cast<size_t>(scenario.groups);
  Truth truth;
  truth.state_index.resize(groups);
  truth.state_ids.resize(groups);
  size_t states = 0;
  if (!scenario.state_labels.empty()) {
    if (scenario.state_labels.size() != groups) throw UsageError("state label length mismatch");
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < groups; ++i) {
      auto [it, inserted] = index.emplace(scenario.state_labels[i], index.size());
      truth.state_index[i] = it->second;
      truth.state_ids[i] = scenario.state_labels[i];
    }
    states = index.size();
  } else {
    if (scenario.states < 1 || scenario.states > scenario.groups) {
      throw DomainError("states must lie in [1, groups]");
    }
    states = static_cast<size_t>(scenario.states);
    for (size_t i = 0; i < groups; ++i) {
      truth.state_index[i] = i * states / groups;
      truth.state_ids[i] = "s" + std::to_string(truth.state_index[i] + 1);
    }
  }

  if (!scenario.populations.empty()) {
    for (double n : scenario.populations) {
      if (!(n > 0.0)) throw DomainError("populations must be positive");
    }
    truth.n = scenario.populations;
  } else {
    truth.n.assign(groups, scenario.n_total / static_cast<double>(groups));
    if (scenario.pop_mode == PopMode::kHeterogeneous) {
      RngStream rng(scenario.seed, StreamId({kTagPopulation}));
      for (double& n : truth.n) n = std::exp(scenario.pop_sigma * rng.NextNormal());
      const double scale = scenario.n_total / kernels::Sum(truth.n);
      for (double& n : truth.n) n *= scale;
    }
  }

  const double base = static_cast<double>(scenario.y_total) / scenario.n_total;
  truth.lambda.assign(groups, base);
  if (scenario.rate_mode == RateMode::kHeterogeneous) {
    RngStream rng(scenario.seed, StreamId({kTagRate}));
    std::vector<double> state_effect(states);
    for (double& e : state_effect) e = rng.NextNormal();
    const double sigma = scenario.rate_sigma;
    for (size_t i = 0; i < groups; ++i) {
      // Unit-variance mix of a shared state effect and a group effect.
      const double u = 0.8 * state_effect[truth.state_index[i]] + 0.6 * rng.NextNormal();
      truth.lambda[i] = base * std::exp(sigma * u - 0.5 * sigma * sigma);
    }
  }
  truth.urban = TopQuintile(truth.n);
  return truth;
}

Truth RegionTruth(int64_t groups_a, int64_t count_ratio, double pop_ratio, double n_total,
                  double rate) {
  if (groups_a < 1 || count_ratio < 1) throw DomainError("group counts must be positive");
  if (!(pop_ratio > 0.0) || !(n_total > 0.0) || !(rate > 0.0)) {
    throw DomainError("ratios, populations and rates must be positive");
  }
  const size_t na = static_cast<size_t>(groups_a);
  const size_t nb = static_cast<size_t>(groups_a * count_ratio);
  const double people_a = n_total / (1.0 + pop_ratio);
  const double people_b = n_total - people_a;
  Truth truth;
  for (size_t i = 0; i < na + nb; ++i) {
    const bool in_a = i < na;
    truth.n.push_back(in_a ? people_a / static_cast<double>(na)
                           : people_b / static_cast<double>(nb));
    truth.lambda.push_back(rate);
    truth.state_index.push_back(in_a ? 0 : 1);
    truth.state_ids.push_back(in_a ? "s1" : "s2");
  }
  truth.urban = TopQuintile(truth.n);
  return truth;
}

CountDataset GenReplicate(const Truth& truth, int64_t y_total, RngStream& rng) {
  std::vector<double> mean(truth.n.size());
  for (size_t i = 0; i < mean.size(); ++i) mean[i] = truth.n[i] * truth.lambda[i];
  const double s = kernels::Sum(mean);
  for (double& m : mean) m /= s;
  auto counts = SampleMultinomial(y_total, mean, rng);
  return CountDataset::Create(std::move(counts), truth.n, {}, truth.state_ids);
}

double Rmse(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw UsageError("rmse length mismatch");
  if (estimate.empty()) throw UsageError("rmse of empty vectors");
  return 1e5 * std::sqrt(kernels::SumSquaredDiff(estimate, truth) /
                         static_cast<double>(estimate.size()));
}

const char* StudyMethodName(StudyMethod m) {
  switch (m) {
    case StudyMethod::kMd:
      return "md";
    case StudyMethod::kPgNational:
      return "pg-national";
    case StudyMethod::kPgState:
      return "pg-state";
  }
  return "unknown";
}

std::vector<double> RateEstimates(StudyMethod method, const CountDataset& data,
                                  const PriorSpec& prior, RngStream& rng) {
  prior.Validate(data.size());
  std::vector<double> out(data.size());
  if (method == StudyMethod::kMd) {
    if (prior.mode != PriorMode::kMultinomialDirichlet) {
      throw UsageError("md estimates need a multinomial-Dirichlet prior");
    }
    std::vector<double> shape(data.size());
    for (size_t i = 0; i < shape.size(); ++i) {
      shape[i] = static_cast<double>(data.counts[i]) + prior.alpha[i];
    }
    const auto theta = SampleDirichlet(shape, rng);
    kernels::ScaleDivide(out, theta, static_cast<double>(data.total), data.populations);
    return out;
  }
  if (prior.mode != PriorMode::kPoissonGamma) {
    throw UsageError("pg estimates need a Poisson-gamma prior");
  }
  for (size_t i = 0; i < out.size(); ++i) {
    const PgPosterior post =
        PgPosteriorFor(data.counts[i], prior.a[i], prior.b[i], data.populations[i]);
    out[i] = SampleGamma(post.shape, post.rate, rng);
  }
  return out;
}

double RegionContrast(std::span<const double> estimates, std::span<const size_t> group_a,
                      std::span<const size_t> group_b, std::span<const double> n) {
  if (group_a.empty() || group_b.empty()) throw UsageError("region groups must be nonempty");
  if (estimates.size() != n.size()) throw UsageError("length mismatch");
  const auto pooled = [&](std::span<const size_t> ids) {
    double events = 0.0;
    double people = 0.0;
    for (size_t i : ids) {
      if (i >= n.size()) throw UsageError("region index out of range");
      events += estimates[i] * n[i];
      people += n[i];
    }
    return events / people;
  };
  for (size_t i : group_a) {
    if (std::find(group_b.begin(), group_b.end(), i) != group_b.end()) {
      throw UsageError("region groups must be disjoint");
    }
  }
  return pooled(group_a) / pooled(group_b);
}

const char* StateTargetsName(StateTargets t) {
  switch (t) {
    case StateTargets::kObserved:
      return "observed";
    case StateTargets::kTrue:
      return "true";
    case StateTargets::kSanitized:
      return "sanitized";
  }
  return "unknown";
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("percentile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("percentile must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<StudyResult> RunStudy(const StudyConfig& config) {
  if (config.replicates < 2) throw UsageError("need at least two replicates");
  if (config.epsilons.empty()) throw UsageError("no epsilon values");
  for (double e : config.epsilons) {
    if (!(e > 0.0)) throw DomainError("epsilon must be positive");
  }
  const size_t n_scen = config.scenarios.size();
  const size_t n_eps = config.epsilons.size();
  const size_t n_rep = static_cast<size_t>(config.replicates);
  constexpr size_t n_meth = std::size(kMethods);

  std::vector<Truth> truths;
  std::vector<std::vector<double>> true_state;
  std::vector<std::vector<size_t>> region_a(n_scen);
  std::vector<std::vector<size_t>> region_b(n_scen);
  for (size_t s = 0; s < n_scen; ++s) {
    truths.push_back(GenTruth(config.scenarios[s]));
    true_state.push_back(TrueStateRates(truths.back()));
    for (size_t i = 0; i < truths[s].n.size(); ++i) {
      if (truths[s].state_index[i] == 0) region_a[s].push_back(i);
      if (truths[s].state_index[i] == 1) region_b[s].push_back(i);
    }
  }

  // slots[((s * n_eps + e) * n_meth + m) * n_rep + l]
  std::vector<ReplicateMetrics> slots(n_scen * n_eps * n_meth * n_rep);
  const auto run_task = [&](size_t task) {
    const size_t s = task / n_rep;
    const size_t l = task % n_rep;
    const Truth& truth = truths[s];
    const Scenario& scen = config.scenarios[s];
    RngStream data_rng(config.seed, StreamId({kTagData, s, l}));
    const CountDataset data = GenReplicate(truth, scen.y_total, data_rng);
    for (size_t e = 0; e < n_eps; ++e) {
      const double eps = config.epsilons[e];
      for (size_t m = 0; m < n_meth; ++m) {
        ReplicateMetrics& out = slots[((s * n_eps + e) * n_meth + m) * n_rep + l];
        RngStream rng(config.seed, StreamId({kTagMethod, s, e, l, m}));
        try {
          PriorSpec prior;
          if (kMethods[m] == StudyMethod::kMd) {
            const double alpha = CalibrateMd(eps, data.total).alpha_min;
            prior = PriorSpec::MultinomialDirichlet(std::vector<double>(data.size(), alpha));
          } else if (kMethods[m] == StudyMethod::kPgNational) {
            prior = CalibratePg(eps, data, {}, TargetRule::kDefaultNational).ToPrior();
          } else {
            std::vector<double> targets;
            if (config.state_targets == StateTargets::kObserved) {
              targets = StateAverageRates(data);
            } else if (config.state_targets == StateTargets::kTrue) {
              targets = true_state[s];
            } else {
              targets = SanitizeStateRates(data, config.sanitize_epsilon, rng);
            }
            prior = CalibratePg(eps, data, targets, TargetRule::kStateAverage).ToPrior();
          }
          const auto est = RateEstimates(kMethods[m], data, prior, rng);
          out.rmse = Rmse(est, truth.lambda);
          out.urban = WeightedRate(est, truth.n, truth.urban, true);
          out.rural = WeightedRate(est, truth.n, truth.urban, false);
          out.contrast = region_a[s].empty() || region_b[s].empty()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : RegionContrast(est, region_a[s], region_b[s], truth.n);
        } catch (const InfeasibleBudgetError& err) {
          out.feasible = false;
          out.note = err.what();
        }
      }
    }
  };

  const size_t tasks = n_scen * n_rep;
  const size_t workers =
      std::clamp<size_t>(static_cast<size_t>(std::max(config.workers, 1)), 1, std::max<size_t>(tasks, 1));
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto worker = [&] {
    for (size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
      try {
        run_task(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<StudyResult> results;
  for (size_t s = 0; s < n_scen; ++s) {
    for (size_t e = 0; e < n_eps; ++e) {
      for (size_t m = 0; m < n_meth; ++m) {
        StudyResult row;
        row.scenario = config.scenarios[s].name;
        row.method = kMethods[m];
        row.epsilon = config.epsilons[e];
        std::vector<double> rmse, urban, rural, contrast;
        for (size_t l = 0; l < n_rep; ++l) {
          const ReplicateMetrics& r = slots[((s * n_eps + e) * n_meth + m) * n_rep + l];
          if (!r.feasible) {
            row.feasible = false;
            row.note = r.note;
            break;
          }
          rmse.push_back(r.rmse);
          urban.push_back(r.urban);
          rural.push_back(r.rural);
          contrast.push_back(r.contrast);
        }
        if (row.feasible) {
          row.rmse = Summarize(rmse);
          row.urban_rate = Summarize(urban);
          row.rural_rate = Summarize(rural);
          row.region_contrast = Summarize(contrast);
        }
        results.push_back(std::move(row));
      }
    }
  }
  return results;
}

}  // namespace dpsynth
