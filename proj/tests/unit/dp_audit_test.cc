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

#include <algorithm>
#include <cmath>
#include <random>

#include "dpsynth/dirichlet_mult.h"
#include "dpsynth/dp_audit.h"
#include "dpsynth/errors.h"
#include "dpsynth/poisson_gamma.h"
#include "oracles.h"

namespace dpsynth {
namespace {

const Pair kEqual{1.0, 1.0};

TEST(EnumerateNeighborsTest, SmallTotals) {
  const auto one = EnumerateNeighbors(1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].y, (CountPair{1, 0}));
  EXPECT_EQ(one[0].x, (CountPair{0, 1}));
  EXPECT_EQ(one[1].y, (CountPair{0, 1}));
  EXPECT_EQ(one[1].x, (CountPair{1, 0}));
  EXPECT_EQ(EnumerateNeighbors(2).size(), 4u);
  for (int64_t total = 1; total <= 12; ++total) {
    const auto pairs = EnumerateNeighbors(total);
    EXPECT_EQ(pairs.size(), static_cast<size_t>(2 * total));
    for (const auto& p : pairs) {
      EXPECT_EQ(p.x[0] + p.x[1], total);
      EXPECT_EQ(std::abs(p.x[0] - p.y[0]) + std::abs(p.x[1] - p.y[1]), 2);
      EXPECT_GE(std::min(p.x[0], p.x[1]), 0);
    }
  }
  EXPECT_THROW(EnumerateNeighbors(0), DomainError);
}

TEST(AuditSynthesizerTest, MdUnitAlphaWitness) {
  const auto prior = PriorSpec::MultinomialDirichlet({1.0, 1.0});
  const auto r = AuditSynthesizer(AuditMechanism::kMd, prior, kEqual, 1.0986, 2);
  EXPECT_NEAR(r.max_abs_log_ratio, std::log(3.0), 1e-15);
  EXPECT_FALSE(r.satisfied);
  EXPECT_TRUE(r.routes_agree);
  // Lexicographically smallest witness attaining ln 3.
  EXPECT_EQ(r.witness.y, (CountPair{0, 2}));
  EXPECT_EQ(r.witness.x, (CountPair{1, 1}));
  EXPECT_EQ(r.witness.z, (CountPair{2, 0}));
  EXPECT_TRUE(AuditSynthesizer(AuditMechanism::kMd, prior, kEqual, 1.0987, 2).satisfied);
  EXPECT_EQ(r.instances_checked, 4 * 3);
  EXPECT_EQ(AuditLogRatio(AuditMechanism::kMd, prior, kEqual,
                          {{1, 1}, {0, 2}, {2, 0}}),
            r.max_abs_log_ratio);
}

TEST(AuditSynthesizerTest, WitnessReproducesMaximum) {
  const auto prior = PriorSpec::PoissonGammaFromTargets({2.5, 4.0}, {0.01, 0.03});
  const Pair n{300.0, 900.0};
  const auto r = AuditSynthesizer(AuditMechanism::kPg2, prior, n, 3.0, 6);
  EXPECT_EQ(AuditLogRatio(AuditMechanism::kPg2, prior, n, r.witness), r.max_abs_log_ratio);
}

TEST(AuditSynthesizerTest, OrderInvariant) {
  const auto prior = PriorSpec::PoissonGammaFromTargets({3.0, 5.0}, {0.02, 0.01});
  const Pair n{100.0, 700.0};
  auto order = EnumerateNeighbors(7);
  const auto base = AuditSynthesizer(AuditMechanism::kPg2Exact, prior, n, 2.0, 7, order);
  std::mt19937 gen(5);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(order.begin(), order.end(), gen);
    const auto r = AuditSynthesizer(AuditMechanism::kPg2Exact, prior, n, 2.0, 7, order);
    EXPECT_EQ(r.max_abs_log_ratio, base.max_abs_log_ratio);
    EXPECT_EQ(r.witness.y, base.witness.y);
    EXPECT_EQ(r.witness.x, base.witness.x);
    EXPECT_EQ(r.witness.z, base.witness.z);
  }
}

TEST(AuditSynthesizerTest, CalibratedMdSatisfied) {
  const double alpha = CalibrateMd(1.0, 4).alpha_min;
  const auto r = AuditSynthesizer(AuditMechanism::kMd,
                                  PriorSpec::MultinomialDirichlet({alpha, alpha}), kEqual, 1.0, 4);
  EXPECT_TRUE(r.satisfied);
  EXPECT_NEAR(r.max_abs_log_ratio, 1.0, 1e-12);
}

TEST(AuditSynthesizerTest, UniformAlphaTightness) {
  for (double alpha : {0.4, 1.0, 2.5}) {
    for (int64_t total = 1; total <= 6; ++total) {
      const auto r = AuditSynthesizer(AuditMechanism::kMd,
                                      PriorSpec::MultinomialDirichlet({alpha, alpha}), kEqual,
                                      10.0, total);
      EXPECT_NEAR(r.max_abs_log_ratio, std::log((total + alpha) / alpha), 1e-12);
      EXPECT_NEAR(r.max_abs_log_ratio, oracle::MdWorstLogRatio({alpha, alpha}, total), 1e-12);
    }
  }
}

TEST(AuditSynthesizerTest, PgWithUniformStructureEqualsMd) {
  for (double a : {1.0, 2.0, 3.5}) {
    const auto md = AuditSynthesizer(AuditMechanism::kMd, PriorSpec::MultinomialDirichlet({a, a}),
                                     kEqual, 1.0, 5);
    const auto pg = AuditSynthesizer(AuditMechanism::kPg2,
                                     PriorSpec::PoissonGammaFromTargets({a, a}, {0.01, 0.01}),
                                     {500.0, 500.0}, 1.0, 5);
    EXPECT_NEAR(md.max_abs_log_ratio, pg.max_abs_log_ratio, 1e-10);
    EXPECT_EQ(md.satisfied, pg.satisfied);
    EXPECT_EQ(md.witness.y, pg.witness.y);
    EXPECT_EQ(md.witness.z, pg.witness.z);
  }
}

TEST(AuditSynthesizerTest, CalibratedPgSatisfiedFloatAndInteger) {
  const Pair populations[] = {{1000.0, 1000.0}, {1000.0, 30000.0}, {50.0, 4000.0}};
  const std::vector<double> rate_sets[] = {{0.001, 0.001}, {0.001, 0.004}, {0.02, 0.0005}};
  for (double eps : {std::log(2.0), 1.0, 2.0, 3.0, 7.0}) {
    for (int64_t total = 1; total <= 6; ++total) {
      for (const Pair& n : populations) {
        for (const auto& rates : rate_sets) {
          const auto data = CountDataset::Create({total, 0}, {n[0], n[1]});
          const auto cal = CalibratePg(eps, data, rates, TargetRule::kCustom);
          const auto prior = cal.ToPrior();
          const auto r = AuditSynthesizer(AuditMechanism::kPg2, prior, n, eps, total);
          EXPECT_TRUE(r.satisfied) << eps << " " << total << " " << r.max_abs_log_ratio;
          EXPECT_TRUE(r.routes_agree) << r.max_route_gap;
          std::vector<double> a = cal.a_min;
          for (double& v : a) v = std::ceil(v);
          const auto ri = AuditSynthesizer(AuditMechanism::kPg2Exact,
                                           PriorSpec::PoissonGammaFromTargets(a, rates), n, eps,
                                           total);
          EXPECT_TRUE(ri.satisfied) << eps << " " << total;
          EXPECT_TRUE(ri.routes_agree) << ri.max_route_gap;
        }
      }
    }
  }
}

TEST(AuditSynthesizerTest, Errors) {
  const auto md = PriorSpec::MultinomialDirichlet({1.0, 1.0});
  EXPECT_THROW(AuditSynthesizer(AuditMechanism::kMd, md, kEqual, 1.0, 13), UsageError);
  EXPECT_THROW(AuditSynthesizer(AuditMechanism::kPg2, md, kEqual, 1.0, 3), UsageError);
  EXPECT_THROW(AuditSynthesizer(AuditMechanism::kPg2Exact,
                                PriorSpec::PoissonGammaFromTargets({1.5, 2.0}, {1.0, 1.0}),
                                kEqual, 1.0, 3),
               UsageError);
}

TEST(SpotCheckTest, LargeTotalCalibratedMd) {
  RngStream rng(81, 1);
  const int64_t total = 500;
  const double alpha = CalibrateMd(2.0, total).alpha_min;
  const auto r = SpotCheckSynthesizer(AuditMechanism::kMd,
                                      PriorSpec::MultinomialDirichlet({alpha, alpha}), kEqual,
                                      2.0, total, 200, rng);
  EXPECT_TRUE(r.satisfied);
  EXPECT_TRUE(r.routes_agree) << r.max_route_gap;
  EXPECT_EQ(r.instances_checked, 200 * 6);
}

TEST(BoundAccuracyTest, Examples) {
  const std::vector<BoundInstance> grid = {
      {{1, 3}, {1.0, 1.0}, 1, 1},  // bound ln 4
      {{1, 3}, {1.0, 1.0}, 3, 2},  // r > 1, max(1 - r, 0) = 0
      {{2, 2}, {1.0, 1.0}, 1, 1},  // tie
      {{0, 3}, {2.0, 4.0}, 1, 1},  // donor count zero
      {{1, 3}, {1.5, 1.0}, 1, 2},  // float path
  };
  const auto rows = BoundAccuracySweep(grid);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(rows[0].bound, std::log(4.0), 1e-15);
  EXPECT_TRUE(rows[0].exact_path);
  EXPECT_LE(std::abs(rows[0].exact_log_ratio_c), std::log(4.0));
  EXPECT_NEAR(rows[1].bound, std::log(4.0), 1e-15);
  EXPECT_TRUE(rows[2].skipped);
  EXPECT_TRUE(rows[3].skipped);
  EXPECT_FALSE(rows[4].exact_path);
  for (const auto& row : rows) {
    if (!row.skipped) {
      EXPECT_GE(row.slack, -1e-12);
    }
  }
  const auto s = SummarizeSlack(rows);
  EXPECT_EQ(s.rows, 3);
  EXPECT_EQ(s.skipped, 2);
  EXPECT_LE(s.min, s.median);
  EXPECT_LE(s.median, s.max);
}

TEST(BoundAccuracyTest, DefaultGridNeverNegative) {
  const auto rows = BoundAccuracySweep(DefaultBoundGrid());
  const auto s = SummarizeSlack(rows);
  EXPECT_GE(s.rows, 400);
  EXPECT_GE(s.min, -1e-12);
}

TEST(StrategyGapTest, ExactStrategyHasNoGap) {
  RngStream rng(91, 1);
  const auto data = CountDataset::Create({3, 5}, {100.0, 400.0});
  const auto prior = PriorSpec::PoissonGammaFromTargets({2.0, 3.0}, {0.02, 0.01});
  EXPECT_LT(StrategyTotalVariation(data, prior, Strategy::kExactEnumeration2, 50000, rng), 0.01);
  const double gap =
      StrategyTotalVariation(data, prior, Strategy::kLambdaThenMultinomial, 50000, rng);
  EXPECT_GE(gap, 0.0);
  EXPECT_LE(gap, 1.0);
}

}  // namespace
}  // namespace dpsynth
