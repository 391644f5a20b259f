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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "dpsynth/dirichlet_mult.h"
#include "dpsynth/errors.h"
#include "oracles.h"

namespace dpsynth {
namespace {

using Counts = std::vector<int64_t>;
using Reals = std::vector<double>;

TEST(CalibrateMdTest, Examples) {
  EXPECT_NEAR(CalibrateMd(7.0, 10000).alpha_min, 9.127, 0.0005);
  EXPECT_NEAR(CalibrateMd(std::log(2.0), 100).alpha_min, 100.0, 1e-10);
  EXPECT_NEAR(CalibrateMd(std::log(3.0), 2).alpha_min, 1.0, 1e-12);
  EXPECT_THROW(CalibrateMd(0.0, 10), DomainError);
  EXPECT_THROW(CalibrateMd(-1.0, 10), DomainError);
  EXPECT_THROW(CalibrateMd(1.0, 0), DomainError);
  EXPECT_THROW(CalibrateMd(1e-320, 10), InfeasibleBudgetError);
}

TEST(CalibrateMdTest, ClosedForm) {
  for (double eps : {0.1, 0.5, 1.0, 2.0, 5.0, 9.0}) {
    for (int64_t z : {1, 7, 1000}) {
      const double expected = static_cast<double>(z) / (std::exp(eps) - 1.0);
      EXPECT_NEAR(CalibrateMd(eps, z).alpha_min / expected, 1.0, 1e-12);
      EXPECT_NEAR(MdEpsilonFor(Reals{CalibrateMd(eps, z).alpha_min + 50.0, CalibrateMd(eps, z).alpha_min}, z), eps, 1e-12);
    }
  }
}

TEST(MdLogPmfTest, HandValues) {
  EXPECT_NEAR(MdLogPmf(Counts{0, 2}, Counts{1, 1}, Reals{1, 1}), std::log(0.3), 1e-14);
  EXPECT_NEAR(MdLogPmf(Counts{1, 1}, Counts{1, 1}, Reals{1, 1}), std::log(0.4), 1e-14);
  EXPECT_THROW(MdLogPmf(Counts{1, 1}, Counts{1, 1, 0}, Reals{1, 1}), UsageError);
  EXPECT_THROW(MdLogPmf(Counts{2, 1}, Counts{1, 1}, Reals{1, 1}), UsageError);
}

TEST(MdLogPmfTest, MatchesBetaBinomialOracleAndNormalizes) {
  const std::array<double, 2> alphas[] = {{1.0, 1.0}, {0.3, 2.7}, {9.127, 40.0}, {1e-3, 5.0}};
  for (const auto& alpha : alphas) {
    for (int64_t total = 0; total <= 20; ++total) {
      for (int64_t y1 = 0; y1 <= total; y1 += 3) {
        const auto ref = oracle::MdPmf2({y1, total - y1}, alpha, total);
        double sum = 0.0;
        for (int64_t z1 = 0; z1 <= total; ++z1) {
          const double p = std::exp(MdLogPmf(Counts{z1, total - z1}, Counts{y1, total - y1},
                                             Reals{alpha[0], alpha[1]}));
          EXPECT_NEAR(p, ref[static_cast<size_t>(z1)], 1e-12);
          sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
  }
}

TEST(MdLogPmfTest, ThreeGroupNormalization) {
  const Counts y = {1, 0, 3};
  const Reals alpha = {0.5, 1.5, 2.0};
  double sum = 0.0;
  for (int64_t a = 0; a <= 4; ++a) {
    for (int64_t b = 0; a + b <= 4; ++b) sum += std::exp(MdLogPmf(Counts{a, b, 4 - a - b}, y, alpha));
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(MdLogRatioTest, Examples) {
  EXPECT_NEAR(MdLogRatio(Counts{2, 0}, Counts{1, 1}, Counts{0, 2}, Reals{1, 1}), std::log(3.0),
              1e-15);
  EXPECT_NEAR(MdLogRatio(Counts{0, 2}, Counts{1, 1}, Counts{0, 2}, Reals{1, 1}), std::log(0.5),
              1e-15);
  EXPECT_THROW(MdLogRatio(Counts{1, 1}, Counts{1, 1}, Counts{1, 1}, Reals{1, 1}), UsageError);
  EXPECT_THROW(MdLogRatio(Counts{1, 1}, Counts{2, 0}, Counts{0, 2}, Reals{1, 1}), UsageError);
}

TEST(MdLogRatioTest, AntisymmetryAndSwapInvariance) {
  const Reals alpha = {0.7, 2.2};
  for (int64_t total = 1; total <= 8; ++total) {
    for (int64_t y1 = 1; y1 <= total; ++y1) {
      const Counts y = {y1, total - y1};
      const Counts x = {y1 - 1, total - y1 + 1};
      for (int64_t z1 = 0; z1 <= total; ++z1) {
        const Counts z = {z1, total - z1};
        const double forward = MdLogRatio(z, y, x, alpha);
        EXPECT_NEAR(forward, -MdLogRatio(z, x, y, alpha), 1e-15);
        EXPECT_NEAR(forward, MdLogPmf(z, y, alpha) - MdLogPmf(z, x, alpha), 1e-12);
        const double swapped = MdLogRatio(Counts{z[1], z[0]}, Counts{y[1], y[0]},
                                          Counts{x[1], x[0]}, Reals{alpha[1], alpha[0]});
        EXPECT_NEAR(std::abs(forward), std::abs(swapped), 1e-15);
      }
    }
  }
}

TEST(MdPrivacyTest, CalibratedAlphaCertifiesBudget) {
  for (double eps : {std::log(2.0), 1.0, 3.0}) {
    for (int64_t total = 1; total <= 6; ++total) {
      const double alpha = CalibrateMd(eps, total).alpha_min;
      EXPECT_LE(oracle::MdWorstLogRatio({alpha, alpha}, total), eps + 1e-12)
          << "eps=" << eps << " total=" << total;
    }
  }
}

TEST(MdPrivacyTest, BoundIsAttainedForUniformAlpha) {
  for (double alpha : {0.5, 1.0, 3.0, 9.127}) {
    for (int64_t total = 1; total <= 6; ++total) {
      EXPECT_NEAR(oracle::MdWorstLogRatio({alpha, alpha}, total),
                  std::log((total + alpha) / alpha), 1e-12);
    }
  }
}

TEST(MdExpectedCountsTest, Limits) {
  const auto sym = MdExpectedCounts(Counts{1, 1}, Reals{1, 1}, 2);
  EXPECT_DOUBLE_EQ(sym[0], 1.0);
  EXPECT_DOUBLE_EQ(sym[1], 1.0);
  const auto prior = MdExpectedCounts(Counts{5, 0}, Reals{1e15, 1e15}, 10);
  EXPECT_NEAR(prior[0], 5.0, 1e-9);
  const auto data = MdExpectedCounts(Counts{5, 0}, Reals{1e-15, 1e-15}, 10);
  EXPECT_NEAR(data[0], 10.0, 1e-9);
}

TEST(MdSynthesizeTest, PriorAndDataDominance) {
  RngStream rng(101, 1);
  const auto even = CountDataset::Create({3, 7}, {1.0, 1.0});
  const auto big = PriorSpec::MultinomialDirichlet({1e12, 1e12});
  const int n = 20000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = MdSynthesize(even, big, rng);
    ASSERT_EQ(z.counts[0] + z.counts[1], 10);
    mean += static_cast<double>(z.counts[0]) / n;
  }
  EXPECT_NEAR(mean, 5.0, 3.0 * std::sqrt(2.5 / n));

  const auto lopsided = CountDataset::Create({10, 0}, {1.0, 1.0});
  const auto tiny = PriorSpec::MultinomialDirichlet({1e-6, 1e-6});
  double first = 0.0;
  for (int i = 0; i < 2000; ++i) first += static_cast<double>(MdSynthesize(lopsided, tiny, rng).counts[0]);
  EXPECT_NEAR(first / 2000.0, 10.0, 1e-3);
}

TEST(MdSynthesizeTest, EmpiricalPmfMatchesExact) {
  RngStream rng(102, 1);
  const auto data = CountDataset::Create({1, 1}, {1.0, 1.0});
  const auto prior = PriorSpec::MultinomialDirichlet({1.0, 1.0});
  const int n = 100000;
  std::array<double, 3> freq{};
  for (int i = 0; i < n; ++i) freq[static_cast<size_t>(MdSynthesize(data, prior, rng).counts[0])] += 1.0 / n;
  const double exact[] = {0.3, 0.4, 0.3};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(freq[k], exact[k], 3.0 * std::sqrt(exact[k] * (1 - exact[k]) / n));
  }
}

TEST(MdSynthesizeTest, ProvenanceAndErrors) {
  RngStream rng(7, 9);
  const auto data = CountDataset::Create({4, 6}, {1.0, 2.0});
  const double alpha = CalibrateMd(1.0, 10).alpha_min;
  const auto z = MdSynthesize(data, PriorSpec::MultinomialDirichlet({alpha, alpha * 2}), rng);
  EXPECT_EQ(z.total, 10);
  EXPECT_EQ(z.provenance.method, "md");
  EXPECT_NEAR(z.provenance.epsilon, 1.0, 1e-12);
  EXPECT_EQ(z.provenance.seed, 7u);
  EXPECT_EQ(z.provenance.stream_id, 9u);
  EXPECT_THROW(MdSynthesize(data, PriorSpec::PoissonGamma({1, 1}, {1, 1}), rng), UsageError);
}

}  // namespace
}  // namespace dpsynth
