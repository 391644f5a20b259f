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

#include "dpsynth/rng.h"

#include <cmath>
#include <initializer_list>
#include <string>

#include "dpsynth/errors.h"
#include "dpsynth/kernels.h"

namespace dpsynth {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

uint64_t Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t SplitMix64(uint64_t& x) {
  x += kGolden;
  return Mix(x);
}

inline uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Marsaglia-Tsang for shape >= 1, unit rate.
double MarsagliaTsang(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.NextNormal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.NextUniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

constexpr int64_t kInversionLimit = 64;

// Sequential-search inversion; intended for n <= kInversionLimit.
int64_t BinomialInversion(int64_t n, double p, RngStream& rng) {
  if (p > 0.5) return n - BinomialInversion(n, 1.0 - p, rng);
  if (n == 0 || p <= 0.0) return 0;
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  for (;;) {
    double r = std::pow(q, static_cast<double>(n));
    double u = rng.NextUniform();
    int64_t x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) break;
      r *= a / static_cast<double>(x) - s;
    }
    if (x <= n) return x;
    // Rounding left residual mass past n; redraw.
  }
}

}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
  uint64_t x = Mix(seed ^ Mix(stream_id + kGolden));
  for (auto& word : s_) word = SplitMix64(x);
}

uint64_t RngStream::NextU64() {
  const uint64_t result = Rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = Rotl(s_[3], 45);
  return result;
}

double RngStream::NextUniform() {
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::NextNormal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u;
  double v;
  double s;
  do {
    u = 2.0 * NextUniform() - 1.0;
    v = 2.0 * NextUniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_normal_ = true;
  return u * factor;
}

uint64_t StreamId(std::initializer_list<uint64_t> coords) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (uint64_t c : coords) h = Mix(h ^ Mix(c + kGolden));
  return h;
}

double SampleGamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("gamma shape and rate must be positive and finite");
  }
  if (shape >= 1.0) return MarsagliaTsang(shape, rng) / rate;
  const double boosted = MarsagliaTsang(shape + 1.0, rng);
  return boosted * std::pow(rng.NextUniform(), 1.0 / shape) / rate;
}

double SampleLogGamma(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("gamma shape must be positive and finite");
  }
  if (shape >= 1.0) return std::log(MarsagliaTsang(shape, rng));
  const double boosted = MarsagliaTsang(shape + 1.0, rng);
  return std::log(boosted) + std::log(rng.NextUniform()) / shape;
}

double SampleBeta(double a, double b, RngStream& rng) {
  const double la = SampleLogGamma(a, rng);
  const double lb = SampleLogGamma(b, rng);
  // x / (x + y) evaluated as 1 / (1 + exp(lb - la)).
  return 1.0 / (1.0 + std::exp(lb - la));
}

int64_t SampleBinomial(int64_t n, double p, RngStream& rng) {
  if (n < 0) throw DomainError("binomial n must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial p must lie in [0,1]");
  int64_t result = 0;
  // Beta splitting on the order statistics of n uniforms: the i-th smallest
  // is Beta(i, n+1-i); recurse into whichever side of it p falls.
  while (n > kInversionLimit && p > 0.0 && p < 1.0) {
    const int64_t i = (n + 1) / 2;
    const double x = SampleBeta(static_cast<double>(i), static_cast<double>(n + 1 - i), rng);
    if (x >= p) {
      n = i - 1;
      p = p / x;
    } else {
      result += i;
      n -= i;
      p = (p - x) / (1.0 - x);
    }
  }
  if (p <= 0.0) return result;
  if (p >= 1.0) return result + n;
  return result + BinomialInversion(n, p, rng);
}

std::vector<double> SampleDirichlet(std::span<const double> alphas, RngStream& rng) {
  if (alphas.empty()) throw DomainError("Dirichlet needs at least one component");
  std::vector<double> out(alphas.size());
  for (size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0) || !std::isfinite(alphas[i])) {
      throw DomainError("Dirichlet parameters must be positive and finite");
    }
    out[i] = SampleLogGamma(alphas[i], rng);
  }
  const double m = kernels::Max(out);
  for (double& v : out) v = std::exp(v - m);
  const double s = kernels::Sum(out);
  for (double& v : out) v /= s;
  return out;
}

std::vector<int64_t> SampleMultinomial(int64_t total, std::span<const double> probs,
                                       RngStream& rng) {
  if (total < 0) throw DomainError("multinomial total must be non-negative");
  if (probs.empty()) throw DomainError("multinomial needs at least one cell");
  double sum = 0.0;
  size_t last_positive = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      throw DomainError("multinomial probabilities must be non-negative");
    }
    if (probs[i] > 0.0) last_positive = i;
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("multinomial probabilities sum to " + std::to_string(sum));
  }
  std::vector<int64_t> counts(probs.size(), 0);
  std::vector<double> suffix(probs.size() + 1, 0.0);
  for (size_t i = probs.size(); i-- > 0;) suffix[i] = suffix[i + 1] + probs[i];
  int64_t remaining = total;
  for (size_t i = 0; i < last_positive && remaining > 0; ++i) {
    if (probs[i] == 0.0) continue;
    const double conditional = std::min(1.0, probs[i] / suffix[i]);
    counts[i] = SampleBinomial(remaining, conditional, rng);
    remaining -= counts[i];
  }
  counts[last_positive] += remaining;
  return counts;
}

double SampleLaplace(double scale, RngStream& rng) {
  if (!(scale >= 0.0)) throw DomainError("Laplace scale must be non-negative");
  if (scale == 0.0) return 0.0;
  const double u = rng.NextUniform() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

}  // namespace dpsynth
