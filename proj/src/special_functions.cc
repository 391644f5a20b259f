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

#include "dpsynth/special_functions.h"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpsynth/errors.h"
#include "dpsynth/kernels.h"

namespace dpsynth {
namespace {

constexpr int kSeriesTerms = 48;

// zeta(k) - 1 for k = 0..kSeriesTerms (entries 0 and 1 unused).
const std::array<double, kSeriesTerms + 1>& ZetaMinusOne() {
  static const std::array<double, kSeriesTerms + 1> table = [] {
    std::array<double, kSeriesTerms + 1> z{};
    z[2] = 0.6449340668482264364724;
    z[3] = 0.2020569031595942853997;
    z[4] = 0.082323233711138191516;
    z[5] = 0.03692775514336992633137;
    z[6] = 0.01734306198444913971452;
    z[7] = 0.008349277381922826839798;
    z[8] = 0.004077356197944339378685;
    z[9] = 0.002008392826082214417853;
    z[10] = 0.000994575127818085337146;
    for (int k = 11; k <= kSeriesTerms; ++k) {
      // Terms decay like j^-k; 64 of them plus the integral tail is far
      // below double precision for k >= 11.
      constexpr int kLast = 64;
      double s = 0.0;
      for (int j = kLast; j >= 2; --j) s += std::pow(static_cast<double>(j), -k);
      s += std::pow(static_cast<double>(kLast), 1.0 - k) / (k - 1) -
           0.5 * std::pow(static_cast<double>(kLast), -k);
      z[k] = s;
    }
    return z;
  }();
  return table;
}

// Σ_{k>=2} (-1)^k (ζ(k)-1) t^k / k, |t| <= 0.5.
double ZetaSeries(double t) {
  const auto& z = ZetaMinusOne();
  double sum = 0.0;
  // Summed smallest-first.
  double power = t * t;
  double terms[kSeriesTerms + 1];
  for (int k = 2; k <= kSeriesTerms; ++k) {
    terms[k] = ((k % 2 == 0) ? 1.0 : -1.0) * z[k] * power / k;
    power *= t;
  }
  for (int k = kSeriesTerms; k >= 2; --k) sum += terms[k];
  return sum;
}

constexpr double kEulerGamma = 0.5772156649015328606065121;

// ln Γ(1+t) for |t| <= 0.5.
double LogGammaOnePlus(double t) {
  return -std::log1p(t) + t * (1.0 - kEulerGamma) + ZetaSeries(t);
}

// ln Γ(2+t) for |t| <= 0.5; the log1p terms cancel analytically.
double LogGammaTwoPlus(double t) { return t * (1.0 - kEulerGamma) + ZetaSeries(t); }

double Stirling(double x) {
  static constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number correction, B_2k / (2k (2k-1) x^(2k-1)).
  double series = -3617.0 / 122400.0;
  series = series * inv2 + 1.0 / 156.0;
  series = series * inv2 - 691.0 / 360360.0;
  series = series * inv2 + 1.0 / 1188.0;
  series = series * inv2 - 1.0 / 1680.0;
  series = series * inv2 + 1.0 / 1260.0;
  series = series * inv2 - 1.0 / 360.0;
  series = series * inv2 + 1.0 / 12.0;
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series * inv;
}

}  // namespace

double LogGamma(double x) {
  if (!(x > 0.0)) throw DomainError("LogGamma requires x > 0");
  if (std::isinf(x)) return x;
  if (x < 0.5) return LogGammaOnePlus(x) - std::log(x);
  if (x <= 1.5) return LogGammaOnePlus(x - 1.0);
  if (x <= 2.5) return LogGammaTwoPlus(x - 2.0);
  if (x < 10.0) {
    double product = 1.0;
    double y = x;
    while (y > 2.5) {
      y -= 1.0;
      product *= y;
    }
    return LogGammaTwoPlus(y - 2.0) + std::log(product);
  }
  return Stirling(x);
}

double LogFactorial(int64_t n) {
  if (n < 0) throw DomainError("LogFactorial requires n >= 0");
  if (n < 2) return 0.0;
  return LogGamma(static_cast<double>(n) + 1.0);
}

double LogSumExp(std::span<const double> x) {
  const double m = kernels::Max(x);
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double LogPmfNegBin(int64_t z, double r, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("negative binomial p must lie in (0,1)");
  if (!(r > 0.0)) throw DomainError("negative binomial r must be positive");
  if (z < 0) return -std::numeric_limits<double>::infinity();
  const double zd = static_cast<double>(z);
  return LogGamma(zd + r) - LogFactorial(z) - LogGamma(r) + zd * std::log(p) +
         r * std::log1p(-p);
}

}  // namespace dpsynth
