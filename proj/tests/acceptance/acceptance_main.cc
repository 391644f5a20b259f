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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "dpsynth/cli_app.h"
#include "dpsynth/dirichlet_mult.h"
#include "dpsynth/dp_audit.h"
#include "dpsynth/exact_math.h"
#include "dpsynth/poisson_gamma.h"
#include "dpsynth/rng.h"
#include "dpsynth/sim_study.h"

namespace dpsynth {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

// 1. Calibration number.
Outcome CalibrationNumber() {
  const double alpha = CalibrateMd(7.0, 10000).alpha_min;
  return {std::abs(alpha - 9.127) <= 0.005, Fmt("alpha_min = %.6f (target 9.127 +/- 0.005)", alpha)};
}

// 2. Exhaustive DP certificate for two groups.
Outcome ExhaustiveCertificate() {
  const double epsilons[] = {std::log(2.0), 1.0, 2.0, 3.0, 7.0};
  const Pair populations[] = {{1000.0, 1000.0}, {1000.0, 30000.0}, {50.0, 4000.0}};
  const std::vector<double> rate_sets[] = {{1e-3, 1e-3}, {1e-3, 4e-3}, {2e-2, 5e-4}};
  int64_t audits = 0;
  int64_t failures = 0;
  double worst_excess = -INFINITY;
  double worst_tightness = 0.0;
  double worst_route_gap = 0.0;
  const auto check = [&](const AuditReport& r) {
    ++audits;
    worst_excess = std::max(worst_excess, r.max_abs_log_ratio - r.epsilon_target);
    worst_route_gap = std::max(worst_route_gap, r.max_route_gap);
    if (!r.satisfied || !r.routes_agree) ++failures;
  };
  for (double eps : epsilons) {
    for (int64_t total = 1; total <= 6; ++total) {
      const double alpha = CalibrateMd(eps, total).alpha_min;
      const auto md = AuditSynthesizer(AuditMechanism::kMd,
                                       PriorSpec::MultinomialDirichlet({alpha, alpha}),
                                       {1.0, 1.0}, eps, total);
      check(md);
      const double tight = std::abs(md.max_abs_log_ratio -
                                    std::log((static_cast<double>(total) + alpha) / alpha));
      worst_tightness = std::max(worst_tightness, tight);
      if (tight > 1e-12) ++failures;
      for (const Pair& n : populations) {
        for (const auto& rates : rate_sets) {
          const auto data = CountDataset::Create({total, 0}, {n[0], n[1]});
          const PgCalibration cal = CalibratePg(eps, data, rates, TargetRule::kCustom);
          check(AuditSynthesizer(AuditMechanism::kPg2, cal.ToPrior(), n, eps, total));
          std::vector<double> a = cal.a_min;
          for (double& v : a) v = std::ceil(v);
          check(AuditSynthesizer(AuditMechanism::kPg2Exact,
                                 PriorSpec::PoissonGammaFromTargets(a, rates), n, eps, total));
        }
      }
    }
  }
  return {failures == 0,
          Fmt("%.0f audits, %.0f failures, max(ratio - eps) = %.3g, md tightness gap = %.3g",
              static_cast<double>(audits), static_cast<double>(failures), worst_excess,
              worst_tightness) +
              Fmt(", max route gap = %.3g", worst_route_gap)};
}

// 3. Exact verification of the normalizer closed form.
Outcome LemmaExact() {
  RngStream rng(2024, 3);
  const auto draw = [&] {
    mpq_class v(mpz_class(static_cast<unsigned long>(1 + rng.NextU64() % 20)),
                mpz_class(static_cast<unsigned long>(1 + rng.NextU64() % 20)));
    v.canonicalize();
    return v;
  };
  int checks = 0;
  int failures = 0;
  for (int c1 = 1; c1 <= 4; ++c1) {
    for (int c2 = 1; c2 <= 4; ++c2) {
      for (int z = 1; z <= 10; ++z) {
        for (int k = 0; k < 5; ++k) {
          const mpq_class p = draw();
          const mpq_class q = draw();
          ++checks;
          if (!Lemma1Check(c1, c2, z, p, q).equal) ++failures;
        }
      }
    }
  }
  return {checks == 800 && failures == 0,
          Fmt("%.0f exact checks, %.0f mismatches", checks, failures)};
}

// 4. Bound dominance over the integer-shape grid.
Outcome BoundDominance() {
  const auto rows = BoundAccuracySweep(DefaultBoundGrid(8, 4));
  const SlackSummary s = SummarizeSlack(rows);
  std::vector<double> slack;
  for (const auto& row : rows) {
    if (!row.skipped) slack.push_back(row.slack);
  }
  std::sort(slack.begin(), slack.end());
  const double q10 = Percentile(slack, 0.10);
  const double q90 = Percentile(slack, 0.90);
  const bool pass = s.rows >= 500 && s.min >= -1e-12;
  return {pass, Fmt("%.0f valid rows (%.0f skipped); slack min %.3g, p10 %.4f, ",
                    static_cast<double>(s.rows), static_cast<double>(s.skipped), s.min, q10) +
                    Fmt("median %.4f, p90 %.4f, max %.4f", s.median, q90, s.max)};
}

// 5. Conditional Poisson-gamma pmf equals the multinomial-Dirichlet pmf under
// uniform structure.
Outcome Equivalence() {
  RngStream rng(55, 5);
  double worst = 0.0;
  int compared = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int64_t total = 1 + static_cast<int64_t>(rng.NextU64() % 40);
    const int64_t y1 = static_cast<int64_t>(rng.NextU64() % static_cast<uint64_t>(total + 1));
    const CountPair y{y1, total - y1};
    const double shape = 0.05 + 20.0 * rng.NextUniform();
    const double n = 10.0 + 1e6 * rng.NextUniform();
    const double rate = 1e-5 + 1e-2 * rng.NextUniform();
    // Equal populations, equal target rates and a shared shape.
    const Pair a{shape, shape};
    const Pair b{shape / rate, shape / rate};
    const Pair pops{n, n};
    const std::vector<double> alpha{shape, shape};
    for (int64_t z1 = 0; z1 <= total; ++z1) {
      const std::array<int64_t, 2> z{z1, total - z1};
      const double pg = PgConditionalLogPmf2(z1, y, a, b, pops, total);
      const double md = MdLogPmf(z, y, alpha);
      worst = std::max(worst, std::abs(pg - md));
      ++compared;
    }
  }
  return {worst <= 1e-10, Fmt("%.0f pmf values, max |diff| = %.3g (tolerance 1e-10)",
                              compared, worst)};
}

// 6. Scaled simulation study.
const StudyResult& Find(const std::vector<StudyResult>& rows, const std::string& scenario,
                        StudyMethod method, double eps) {
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.method == method && r.epsilon == eps) return r;
  }
  throw std::runtime_error("missing study row");
}

Outcome SimulationStudy() {
  StudyConfig config;
  config.scenarios = {Scenario::Named("uniform"), Scenario::Named("heterogeneous-n")};
  config.replicates = 50;
  config.seed = 1;
  config.workers = 4;
  const auto rows = RunStudy(config);
  bool a_ok = true;
  bool b_ok = true;
  bool c_ok = true;
  std::string detail;
  for (double eps : config.epsilons) {
    const auto& md = Find(rows, "uniform", StudyMethod::kMd, eps);
    const auto& pgn = Find(rows, "uniform", StudyMethod::kPgNational, eps);
    if (!(md.feasible && pgn.feasible) ||
        std::max(md.rmse.lo, pgn.rmse.lo) > std::min(md.rmse.hi, pgn.rmse.hi)) {
      a_ok = false;
    }
    const auto& hmd = Find(rows, "heterogeneous-n", StudyMethod::kMd, eps);
    const auto& hpn = Find(rows, "heterogeneous-n", StudyMethod::kPgNational, eps);
    const auto& hps = Find(rows, "heterogeneous-n", StudyMethod::kPgState, eps);
    if (!(hpn.rmse.mean < hmd.rmse.mean && hps.rmse.mean < hmd.rmse.mean)) b_ok = false;
    if (eps <= 1.0 && !(hpn.rmse.hi < hmd.rmse.lo && hps.rmse.hi < hmd.rmse.lo)) b_ok = false;
    const double ratio = hmd.rural_rate.mean / hmd.urban_rate.mean;
    if (eps <= 1.0 && !(ratio >= 1.5)) c_ok = false;
    detail += Fmt("\n    eps %.1f: uniform md %.2f [%.2f, %.2f]", eps, md.rmse.mean, md.rmse.lo,
                  md.rmse.hi) +
              Fmt(" pg-n %.2f [%.2f, %.2f];", pgn.rmse.mean, pgn.rmse.lo, pgn.rmse.hi) +
              Fmt(" het-n md %.2f [%.2f, %.2f]", hmd.rmse.mean, hmd.rmse.lo, hmd.rmse.hi) +
              Fmt(" pg-n %.2f [%.2f, %.2f]", hpn.rmse.mean, hpn.rmse.lo, hpn.rmse.hi) +
              Fmt(" pg-s %.2f [%.2f, %.2f];", hps.rmse.mean, hps.rmse.lo, hps.rmse.hi) +
              Fmt(" md rural/urban %.2f", ratio);
  }

  // Region contrast under a near-infinite Dirichlet prior: region B holds 14
  // times the population of region A across twice as many groups.
  const Truth truth = RegionTruth(10, 2, 14.0, 2.5e6, 4e-4);
  std::vector<size_t> group_a;
  std::vector<size_t> group_b;
  for (size_t i = 0; i < truth.n.size(); ++i) {
    (truth.state_index[i] == 0 ? group_a : group_b).push_back(i);
  }
  const auto prior = PriorSpec::MultinomialDirichlet(std::vector<double>(truth.n.size(), 1e8));
  double contrast = 0.0;
  for (uint64_t rep = 0; rep < 50; ++rep) {
    RngStream data_rng(1, StreamId({3, rep}));
    RngStream method_rng(1, StreamId({4, rep}));
    const CountDataset data = GenReplicate(truth, 1000, data_rng);
    const auto est = RateEstimates(StudyMethod::kMd, data, prior, method_rng);
    contrast += RegionContrast(est, group_a, group_b, truth.n) / 50.0;
  }
  const bool d_ok = std::abs(contrast - 7.0) <= 0.5;
  detail = std::string("(a) ") + (a_ok ? "ok" : "FAIL") + " (b) " + (b_ok ? "ok" : "FAIL") +
           " (c) " + (c_ok ? "ok" : "FAIL") + " (d) " + (d_ok ? "ok" : "FAIL") +
           Fmt(" region contrast %.3f (target 7 +/- 0.5)", contrast) + detail;
  return {a_ok && b_ok && c_ok && d_ok, detail};
}

// 7. Exact two-group sampler against its pmf.
Outcome SamplerAgreement() {
  RngStream setup(77, 7);
  RngStream rng(77, 8);
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const int64_t total = 1 + static_cast<int64_t>(setup.NextU64() % 12);
    const int64_t y1 = static_cast<int64_t>(setup.NextU64() % static_cast<uint64_t>(total + 1));
    const double n1 = 100.0 + 1e5 * setup.NextUniform();
    const double n2 = 100.0 + 1e5 * setup.NextUniform();
    const auto data = CountDataset::Create({y1, total - y1}, {n1, n2});
    const auto prior = PriorSpec::PoissonGammaFromTargets(
        {0.2 + 8.0 * setup.NextUniform(), 0.2 + 8.0 * setup.NextUniform()},
        {1e-4 + 1e-2 * setup.NextUniform(), 1e-4 + 1e-2 * setup.NextUniform()});
    worst = std::max(worst,
                     StrategyTotalVariation(data, prior, Strategy::kExactEnumeration2, 100000, rng));
  }
  return {worst < 0.01, Fmt("10 instances, 1e5 draws each, max TV = %.4f (limit 0.01)", worst)};
}

// 8. Byte-identical outputs for repeated runs and different worker counts.
std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome Reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dpsynth_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream log;
  bool ok = true;

  RunConfig sim;
  sim.command = Command::kSimulate;
  sim.scenarios = {"heterogeneous-both"};
  sim.replicates = 10;
  sim.seed = 8;
  sim.workers = 1;
  sim.output_path = (dir / "sim_w1.csv").string();
  ok = ok && Run(sim, log) == kExitOk;
  sim.workers = 4;
  sim.output_path = (dir / "sim_w4.csv").string();
  ok = ok && Run(sim, log) == kExitOk;
  sim.output_path = (dir / "sim_w4b.csv").string();
  ok = ok && Run(sim, log) == kExitOk;
  const std::string s1 = ReadFile(dir / "sim_w1.csv");
  ok = ok && !s1.empty() && s1 == ReadFile(dir / "sim_w4.csv") &&
       s1 == ReadFile(dir / "sim_w4b.csv");

  {
    std::ofstream in(dir / "counts.csv", std::ios::binary);
    in << "group_id,state_id,population,count\n"
          "g1,s1,1200,4\ng2,s1,800,1\ng3,s2,5000,9\ng4,s2,300,0\n";
  }
  RunConfig syn;
  syn.command = Command::kSynthesize;
  syn.method = "pg";
  syn.epsilon = 1.0;
  syn.m_datasets = 3;
  syn.seed = 8;
  syn.input_path = (dir / "counts.csv").string();
  for (const char* prefix : {"a", "b"}) {
    fs::create_directories(dir / prefix);
    syn.output_path = (dir / prefix / "rel").string();
    ok = ok && Run(syn, log) == kExitOk;
  }
  for (const char* name : {"rel_m1.csv", "rel_m2.csv", "rel_m3.csv", "rel.provenance.json"}) {
    const std::string a = ReadFile(dir / "a" / name);
    ok = ok && !a.empty() && a == ReadFile(dir / "b" / name);
  }
  fs::remove_all(dir);
  return {ok, "simulate (workers 1, 4, 4) and synthesize (x2) outputs byte-identical"};
}

}  // namespace
}  // namespace dpsynth

int main() {
  using Clock = std::chrono::steady_clock;
  const std::pair<const char*, std::function<dpsynth::Outcome()>> criteria[] = {
      {"calibration number", dpsynth::CalibrationNumber},
      {"exhaustive DP certificate", dpsynth::ExhaustiveCertificate},
      {"normalizer closed form, exact", dpsynth::LemmaExact},
      {"bound dominance", dpsynth::BoundDominance},
      {"md / pg equivalence", dpsynth::Equivalence},
      {"simulation study", dpsynth::SimulationStudy},
      {"sampler vs pmf", dpsynth::SamplerAgreement},
      {"reproducibility", dpsynth::Reproducibility},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto start = Clock::now();
    dpsynth::Outcome outcome;
    try {
      outcome = fn();
    } catch (const std::exception& err) {
      outcome = {false, std::string("exception: ") + err.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (!outcome.pass) ++failed;
    std::printf("%s %d %s (%.2f s): %s\n", outcome.pass ? "PASS" : "FAIL", index, name, secs,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", index - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
