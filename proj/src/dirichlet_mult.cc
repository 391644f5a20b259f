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

#include "dpsynth/dirichlet_mult.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpsynth/errors.h"
#include "dpsynth/neighbors.h"
#include "dpsynth/special_functions.h"

namespace dpsynth {

MdCalibration CalibrateMd(double epsilon, int64_t z_total) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be positive and finite");
  }
  if (z_total < 1) throw DomainError("z_total must be at least 1");
  const double alpha_min = static_cast<double>(z_total) / std::expm1(epsilon);
  if (!std::isfinite(alpha_min)) {
    throw InfeasibleBudgetError("epsilon too small: required alpha overflows");
  }
  return {epsilon, z_total, alpha_min};
}

double MdEpsilonFor(std::span<const double> alpha, int64_t z_total) {
  if (alpha.empty()) throw UsageError("alpha is empty");
  const double min_alpha = *std::min_element(alpha.begin(), alpha.end());
  if (!(min_alpha > 0.0)) throw DomainError("alpha must be positive");
  return std::log1p(static_cast<double>(z_total) / min_alpha);
}

SyntheticDataset MdSynthesize(const CountDataset& data, const PriorSpec& prior,
                              RngStream& rng) {
  if (prior.mode != PriorMode::kMultinomialDirichlet) {
    throw UsageError("MdSynthesize needs a multinomial-Dirichlet prior");
  }
  prior.Validate(data.size());
  std::vector<double> posterior(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    posterior[i] = static_cast<double>(data.counts[i]) + prior.alpha[i];
  }
  const std::vector<double> theta = SampleDirichlet(posterior, rng);
  SyntheticDataset out;
  out.counts = SampleMultinomial(data.total, theta, rng);
  out.total = data.total;
  out.provenance.method = "md";
  out.provenance.epsilon = data.total > 0 ? MdEpsilonFor(prior.alpha, data.total) : 0.0;
  out.provenance.seed = rng.seed();
  out.provenance.stream_id = rng.stream_id();
  out.provenance.strategy = Strategy::kPosteriorMultinomial;
  return out;
}

double MdLogPmf(std::span<const int64_t> z, std::span<const int64_t> y,
                std::span<const double> alpha) {
  if (z.size() != y.size() || y.size() != alpha.size()) {
    throw UsageError("z, y and alpha must have the same length");
  }
  const int64_t z_total = std::accumulate(z.begin(), z.end(), int64_t{0});
  const int64_t y_total = std::accumulate(y.begin(), y.end(), int64_t{0});
  if (z_total != y_total) throw UsageError("synthetic total must equal the data total");
  double prior_sum = 0.0;
  double result = LogFactorial(z_total);
  for (size_t i = 0; i < z.size(); ++i) {
    if (z[i] < 0 || y[i] < 0) throw DomainError("counts must be non-negative");
    if (!(alpha[i] > 0.0)) throw DomainError("alpha must be positive");
    const double post = static_cast<double>(y[i]) + alpha[i];
    prior_sum += post;
    result += -LogFactorial(z[i]) - LogGamma(post) + LogGamma(static_cast<double>(z[i]) + post);
  }
  result += LogGamma(prior_sum) - LogGamma(static_cast<double>(z_total) + prior_sum);
  return result;
}

double MdLogRatio(std::span<const int64_t> z, std::span<const int64_t> y,
                  std::span<const int64_t> x, std::span<const double> alpha) {
  if (z.size() != y.size() || alpha.size() != y.size()) {
    throw UsageError("z, y and alpha must have the same length");
  }
  const Transposition t = FindTransposition(y, x);
  const auto zd = [&](size_t i) { return static_cast<double>(z[i]); };
  const double donor_base = alpha[t.donor] + static_cast<double>(y[t.donor]) - 1.0;
  const double receiver_base = alpha[t.receiver] + static_cast<double>(y[t.receiver]);
  // Γ(α+y-1)/Γ(α+y) · Γ(z+α+y)/Γ(z+α+y-1) on the donor side and the mirror
  // image on the receiver side.
  return std::log1p(zd(t.donor) / donor_base) - std::log1p(zd(t.receiver) / receiver_base);
}

std::vector<double> MdExpectedCounts(std::span<const int64_t> y,
                                     std::span<const double> alpha, int64_t z_total) {
  if (y.size() != alpha.size()) throw UsageError("y and alpha must have the same length");
  std::vector<double> out(y.size());
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  double total = alpha_sum;
  for (int64_t v : y) total += static_cast<double>(v);
  for (size_t i = 0; i < y.size(); ++i) {
    out[i] = (static_cast<double>(y[i]) + alpha[i]) / total * static_cast<double>(z_total);
  }
  return out;
}

}  // namespace dpsynth
