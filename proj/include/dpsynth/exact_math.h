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

#ifndef DPSYNTH_EXACT_MATH_H_
#define DPSYNTH_EXACT_MATH_H_

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

namespace dpsynth {

// Polynomial in two variables p and q with rational coefficients. Zero
// coefficients are never stored.
class BivariatePoly {
 public:
  using Key = std::pair<int, int>;  // (degree in p, degree in q)

  BivariatePoly() = default;
  static BivariatePoly Monomial(const mpq_class& coeff, int deg_p, int deg_q);

  const std::map<Key, mpq_class>& coeffs() const { return coeffs_; }
  bool IsZero() const { return coeffs_.empty(); }
  mpq_class Coeff(int deg_p, int deg_q) const;
  void AddTerm(const mpq_class& coeff, int deg_p, int deg_q);

  BivariatePoly operator+(const BivariatePoly& other) const;
  BivariatePoly operator-(const BivariatePoly& other) const;
  BivariatePoly operator*(const BivariatePoly& other) const;
  bool operator==(const BivariatePoly& other) const { return coeffs_ == other.coeffs_; }

  mpq_class Evaluate(const mpq_class& p, const mpq_class& q) const;
  // Result has only p-degrees.
  BivariatePoly SubstituteQWithP() const;
  std::string ToString() const;

 private:
  std::map<Key, mpq_class> coeffs_;
};

enum class PolyVar { kP, kQ };

// Exact quotient by (q - p). Throws DomainError when the remainder is nonzero.
BivariatePoly DivideByQMinusP(const BivariatePoly& numerator);

BivariatePoly Differentiate(const BivariatePoly& poly, PolyVar var, int times);

// p^(c1-1) q^(z+c2) - p^(z+c1) q^(c2-1)
BivariatePoly Lemma1Numerator(int c1, int c2, int z_total);

// Closed form as a polynomial: derivatives of the numerator over (q - p).
BivariatePoly Lemma1Polynomial(int c1, int c2, int z_total);

// Γ(z+c)/z! for integer c >= 1, as the product (z+1)...(z+c-1).
mpz_class RisingRatio(int64_t z, int64_t c);

struct Lemma1Result {
  mpq_class lhs;
  mpq_class rhs;
  bool equal = false;
};

Lemma1Result Lemma1Check(int c1, int c2, int z_total, const mpq_class& p,
                         const mpq_class& q);

// Sum over z of Γ(z+y1+a1)/z! Γ(z·-z+y2+a2)/(z·-z)! r1^z for integer shapes.
mpq_class ExactC(const std::array<int64_t, 2>& y, const std::array<int64_t, 2>& a,
                 const mpq_class& r1, int64_t z_total);

// Natural log of a positive rational without overflow.
double LogRational(const mpq_class& value);

}  // namespace dpsynth

#endif  // DPSYNTH_EXACT_MATH_H_
