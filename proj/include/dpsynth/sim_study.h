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

#ifndef DPSYNTH_SIM_STUDY_H_
#define DPSYNTH_SIM_STUDY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/rng.h"
#include "dpsynth/types.h"

namespace dpsynth {

enum class PopMode { kUniform, kHeterogeneous };
enum class RateMode { kUniform, kHeterogeneous };

struct Scenario {
  std::string name = "uniform";
  PopMode pop_mode = PopMode::kUniform;
  RateMode rate_mode = RateMode::kUniform;
  int64_t groups = 200;
  int64_t y_total = 1000;
  double n_total = 2.5e6;
  int64_t states = 10;
  double pop_sigma = 1.0;   // log-normal spread of populations
  double rate_sigma = 0.3;  // log-scale spread of rates
  uint64_t seed = 1;
  // When set, these replace the generated populations (and state layout);
  // groups and n_total follow from them.
  std::vector<double> populations;
  std::vector<std::string> state_labels;

  // "uniform", "heterogeneous-n", "heterogeneous-rate", "heterogeneous-both".
  static Scenario Named(const std::string& name);
};

std::vector<std::string> ScenarioNames();

struct Truth {
  std::vector<double> n;
  std::vector<double> lambda;
  std::vector<std::string> state_ids;
  std::vector<size_t> state_index;
  std::vector<bool> urban;  // top population quintile
};

Truth GenTruth(const Scenario& scenario);

// Two-state design with equal true rates: state 0 holds groups_a groups and
// state 1 holds groups_a * count_ratio groups with pop_ratio times the people.
Truth RegionTruth(int64_t groups_a, int64_t count_ratio, double pop_ratio, double n_total,
                  double rate);

// y ~ Mult(y_total, n_i lambda_i / sum_j n_j lambda_j).
CountDataset GenReplicate(const Truth& truth, int64_t y_total, RngStream& rng);

// 100,000 x root mean squared difference.
double Rmse(std::span<const double> estimate, std::span<const double> truth);

enum class StudyMethod { kMd, kPgNational, kPgState };

const char* StudyMethodName(StudyMethod m);

// One posterior draw of the group rates.
std::vector<double> RateEstimates(StudyMethod method, const CountDataset& data,
                                  const PriorSpec& prior, RngStream& rng);

// Population-weighted mean rate of group A over that of group B.
double RegionContrast(std::span<const double> estimates, std::span<const size_t> group_a,
                      std::span<const size_t> group_b, std::span<const double> n);

enum class StateTargets { kObserved, kTrue, kSanitized };

const char* StateTargetsName(StateTargets t);

struct StudyConfig {
  std::vector<Scenario> scenarios;
  std::vector<double> epsilons{0.5, 1.0, 2.0, 4.0, 8.0};
  int64_t replicates = 50;
  uint64_t seed = 1;
  int workers = 1;
  StateTargets state_targets = StateTargets::kObserved;
  double sanitize_epsilon = 1.0;
};

struct MetricSummary {
  double mean = 0.0;
  double lo = 0.0;  // 2.5th percentile
  double hi = 0.0;  // 97.5th percentile
};

struct StudyResult {
  std::string scenario;
  StudyMethod method = StudyMethod::kMd;
  double epsilon = 0.0;
  bool feasible = true;
  std::string note;
  MetricSummary rmse;
  MetricSummary urban_rate;
  MetricSummary rural_rate;
  MetricSummary region_contrast;  // state 0 over state 1
};

// Linear-interpolation percentile of unsorted values, q in [0, 1].
double Percentile(std::vector<double> values, double q);

std::vector<StudyResult> RunStudy(const StudyConfig& config);

}  // namespace dpsynth

#endif  // DPSYNTH_SIM_STUDY_H_
