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

#include "dpsynth/exact_math.h"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dpsynth/errors.h"

namespace dpsynth {
namespace {

mpq_class Power(const mpq_class& base, int exponent) {
  mpq_class out = 1;
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

double LogInteger(const mpz_class& v) {
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, v.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

}  // namespace

BivariatePoly BivariatePoly::Monomial(const mpq_class& coeff, int deg_p, int deg_q) {
  BivariatePoly out;
  out.AddTerm(coeff, deg_p, deg_q);
  return out;
}

mpq_class BivariatePoly::Coeff(int deg_p, int deg_q) const {
  auto it = coeffs_.find({deg_p, deg_q});
  return it == coeffs_.end() ? mpq_class(0) : it->second;
}

void BivariatePoly::AddTerm(const mpq_class& coeff, int deg_p, int deg_q) {
  if (deg_p < 0 || deg_q < 0) throw DomainError("negative polynomial degree");
  if (coeff == 0) return;
  auto [it, inserted] = coeffs_.emplace(Key{deg_p, deg_q}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) coeffs_.erase(it);
  }
}

BivariatePoly BivariatePoly::operator+(const BivariatePoly& other) const {
  BivariatePoly out = *this;
  for (const auto& [key, c] : other.coeffs_) out.AddTerm(c, key.first, key.second);
  return out;
}

BivariatePoly BivariatePoly::operator-(const BivariatePoly& other) const {
  BivariatePoly out = *this;
  for (const auto& [key, c] : other.coeffs_) out.AddTerm(-c, key.first, key.second);
  return out;
}

BivariatePoly BivariatePoly::operator*(const BivariatePoly& other) const {
  BivariatePoly out;
  for (const auto& [k1, c1] : coeffs_) {
    for (const auto& [k2, c2] : other.coeffs_) {
      out.AddTerm(c1 * c2, k1.first + k2.first, k1.second + k2.second);
    }
  }
  return out;
}

mpq_class BivariatePoly::Evaluate(const mpq_class& p, const mpq_class& q) const {
  mpq_class total = 0;
  for (const auto& [key, c] : coeffs_) total += c * Power(p, key.first) * Power(q, key.second);
  return total;
}

BivariatePoly BivariatePoly::SubstituteQWithP() const {
  BivariatePoly out;
  for (const auto& [key, c] : coeffs_) out.AddTerm(c, key.first + key.second, 0);
  return out;
}

std::string BivariatePoly::ToString() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << it->second.get_str();
    if (it->first.first > 0) os << "*p^" << it->first.first;
    if (it->first.second > 0) os << "*q^" << it->first.second;
  }
  return os.str();
}

BivariatePoly DivideByQMinusP(const BivariatePoly& numerator) {
  if (!numerator.SubstituteQWithP().IsZero()) {
    throw DomainError("polynomial does not vanish on q = p");
  }
  if (numerator.IsZero()) return {};
  // Synthetic division in q; coefficients of each q-power live in Q[p].
  int max_q = 0;
  for (const auto& [key, c] : numerator.coeffs()) max_q = std::max(max_q, key.second);
  std::vector<BivariatePoly> by_q(static_cast<size_t>(max_q) + 1);
  for (const auto& [key, c] : numerator.coeffs()) {
    by_q[static_cast<size_t>(key.second)].AddTerm(c, key.first, 0);
  }
  const BivariatePoly p = BivariatePoly::Monomial(1, 1, 0);
  BivariatePoly quotient;
  BivariatePoly carry;
  for (int k = max_q; k >= 1; --k) {
    carry = by_q[static_cast<size_t>(k)] + p * carry;
    for (const auto& [key, c] : carry.coeffs()) quotient.AddTerm(c, key.first, k - 1);
  }
  const BivariatePoly remainder = by_q[0] + p * carry;
  if (!remainder.IsZero()) throw DomainError("nonzero remainder dividing by (q - p)");
  return quotient;
}

BivariatePoly Differentiate(const BivariatePoly& poly, PolyVar var, int times) {
  if (times < 0) throw DomainError("derivative order must be non-negative");
  BivariatePoly out;
  for (const auto& [key, c] : poly.coeffs()) {
    const int degree = var == PolyVar::kP ? key.first : key.second;
    if (degree < times) continue;
    mpq_class factor = c;
    for (int k = 0; k < times; ++k) factor *= degree - k;
    if (var == PolyVar::kP) {
      out.AddTerm(factor, key.first - times, key.second);
    } else {
      out.AddTerm(factor, key.first, key.second - times);
    }
  }
  return out;
}

BivariatePoly Lemma1Numerator(int c1, int c2, int z_total) {
  if (c1 < 1 || c2 < 1) throw DomainError("c1 and c2 must be positive integers");
  if (z_total < 0) throw DomainError("z_total must be non-negative");
  return BivariatePoly::Monomial(1, c1 - 1, z_total + c2) -
         BivariatePoly::Monomial(1, z_total + c1, c2 - 1);
}

BivariatePoly Lemma1Polynomial(int c1, int c2, int z_total) {
  const BivariatePoly quotient = DivideByQMinusP(Lemma1Numerator(c1, c2, z_total));
  return Differentiate(Differentiate(quotient, PolyVar::kP, c1 - 1), PolyVar::kQ, c2 - 1);
}

mpz_class RisingRatio(int64_t z, int64_t c) {
  if (z < 0 || c < 1) throw DomainError("rising ratio needs z >= 0 and c >= 1");
  mpz_class out = 1;
  for (int64_t k = z + 1; k <= z + c - 1; ++k) out *= static_cast<unsigned long>(k);
  return out;
}

Lemma1Result Lemma1Check(int c1, int c2, int z_total, const mpq_class& p,
                         const mpq_class& q) {
  if (c1 < 1 || c2 < 1) throw DomainError("c1 and c2 must be positive integers");
  if (z_total < 1) throw DomainError("z_total must be a positive integer");
  if (p <= 0 || q <= 0) throw DomainError("p and q must be positive");
  Lemma1Result result;
  for (int z = 0; z <= z_total; ++z) {
    result.lhs += mpq_class(RisingRatio(z, c1) * RisingRatio(z_total - z, c2)) * Power(p, z) *
                  Power(q, z_total - z);
  }
  result.rhs = Lemma1Polynomial(c1, c2, z_total).Evaluate(p, q);
  result.equal = result.lhs == result.rhs;
  return result;
}

mpq_class ExactC(const std::array<int64_t, 2>& y, const std::array<int64_t, 2>& a,
                 const mpq_class& r1, int64_t z_total) {
  if (y[0] < 0 || y[1] < 0) throw DomainError("counts must be non-negative");
  if (a[0] < 1 || a[1] < 1) throw DomainError("shapes must be positive integers");
  if (r1 < 0) throw DomainError("r1 must be non-negative");
  if (z_total < 0) throw DomainError("z_total must be non-negative");
  mpq_class total = 0;
  mpq_class r_power = 1;
  for (int64_t z = 0; z <= z_total; ++z) {
    if (r_power == 0) break;
    total += mpq_class(RisingRatio(z, y[0] + a[0]) * RisingRatio(z_total - z, y[1] + a[1])) *
             r_power;
    r_power *= r1;
  }
  return total;
}

double LogRational(const mpq_class& value) {
  if (value <= 0) throw DomainError("log of a non-positive rational");
  return LogInteger(value.get_num()) - LogInteger(value.get_den());
}

}  // namespace dpsynth
