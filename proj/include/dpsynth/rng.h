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

#ifndef DPSYNTH_RNG_H_
#define DPSYNTH_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace dpsynth {

// Reproducible random stream. Each (seed, stream_id) pair selects an
// independent xoshiro256** sequence; the state is derived with SplitMix64 so
// neighbouring stream ids give unrelated sequences. Owned by one worker at a
// time.
class RngStream {
 public:
  using result_type = uint64_t;

  RngStream(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return NextU64(); }

  uint64_t NextU64();
  // Uniform on the open interval (0, 1).
  double NextUniform();
  double NextNormal();

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t s_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Derives a stream id from a list of small coordinates (replicate, method,
// ...), so callers can name streams structurally.
uint64_t StreamId(std::initializer_list<uint64_t> coords);

// Gamma(shape, rate) draw, mean shape/rate. Marsaglia-Tsang; shape < 1 is
// boosted through Gamma(shape+1) * U^(1/shape). Throws DomainError for
// non-positive parameters.
double SampleGamma(double shape, double rate, RngStream& rng);

// ln of a Gamma(shape, 1) draw; stays finite for tiny shapes where the draw
// itself underflows.
double SampleLogGamma(double shape, RngStream& rng);

double SampleBeta(double a, double b, RngStream& rng);

// Binomial(n, p), exact for all n.
int64_t SampleBinomial(int64_t n, double p, RngStream& rng);

// Dirichlet(alphas). Components are normalised in log space. Throws
// DomainError for an empty vector or a non-positive entry.
std::vector<double> SampleDirichlet(std::span<const double> alphas, RngStream& rng);

// Multinomial(total, probs) by sequential conditional binomials. probs must
// be non-negative and sum to 1 within 1e-9; the counts sum to total exactly.
std::vector<int64_t> SampleMultinomial(int64_t total, std::span<const double> probs,
                                       RngStream& rng);

// Laplace(0, scale); scale == 0 returns 0.
double SampleLaplace(double scale, RngStream& rng);

}  // namespace dpsynth

#endif  // DPSYNTH_RNG_H_
