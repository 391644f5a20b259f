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

#include "dpsynth/cli_app.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "dpsynth/dirichlet_mult.h"
#include "dpsynth/dp_audit.h"
#include "dpsynth/errors.h"
#include "dpsynth/exact_math.h"
#include "dpsynth/kernels.h"
#include "dpsynth/poisson_gamma.h"
#include "dpsynth/rng.h"
#include "dpsynth/sim_study.h"

namespace dpsynth {
namespace {

using Json = nlohmann::ordered_json;

constexpr uint64_t kLemmaStream = 0x4c454d4d41;  // "LEMMA"

std::string Exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <typename T, typename F>
std::string Join(const std::vector<T>& values, F format) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format(values[i]);
  }
  return out;
}

std::string JoinDoubles(const std::vector<double>& v) { return Join(v, Exact); }

std::vector<std::string> Split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string CsvPreamble(const RunConfig& config) {
  std::string out = std::string("# dpsynth ") + kVersion + "\n";
  out += "# seed: " + std::to_string(config.seed) + "\n";
  for (const auto& [key, value] : ConfigEntries(config)) {
    out += "# config: " + key + "=" + value + "\n";
  }
  return out;
}

Json JsonHeader(const RunConfig& config) {
  Json j;
  j["tool"] = "dpsynth";
  j["version"] = kVersion;
  j["seed"] = config.seed;
  Json entries = Json::object();
  for (const auto& [key, value] : ConfigEntries(config)) entries[key] = value;
  j["config"] = entries;
  return j;
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

void RequireEpsilon(const RunConfig& config) {
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw UsageError("--epsilon must be a positive number");
  }
}

// Expands a length-1 vector to `groups` copies.
std::vector<double> Broadcast(const std::vector<double>& v, size_t groups, const char* name) {
  if (v.size() == 1) return std::vector<double>(groups, v[0]);
  if (v.size() != groups) {
    throw UsageError(std::string("--") + name + " needs 1 or " + std::to_string(groups) +
                     " values");
  }
  return v;
}

TargetRule RuleFor(const RunConfig& config) {
  if (!config.target_rates.empty()) return TargetRule::kCustom;
  if (config.target == "national") return TargetRule::kDefaultNational;
  if (config.target == "state") return TargetRule::kStateAverage;
  throw UsageError("--target must be national or state");
}

std::vector<double> TargetsFor(const RunConfig& config, const CountDataset& data) {
  switch (RuleFor(config)) {
    case TargetRule::kCustom:
      return Broadcast(config.target_rates, data.size(), "target-rates");
    case TargetRule::kStateAverage:
      return StateAverageRates(data);
    case TargetRule::kDefaultNational:
      return NationalTargetRates(data);
  }
  return {};
}

// PG prior from explicit --a, or calibrated at the requested epsilon.
PriorSpec PgPriorFor(const RunConfig& config, const CountDataset& data) {
  const auto targets = TargetsFor(config, data);
  std::vector<double> a;
  if (!config.a.empty()) {
    a = Broadcast(config.a, data.size(), "a");
  } else {
    RequireEpsilon(config);
    a = CalibratePg(config.epsilon, data, targets, RuleFor(config)).a_min;
  }
  if (config.integer_a) {
    for (double& v : a) v = std::ceil(v);
  }
  return PriorSpec::PoissonGammaFromTargets(std::move(a), targets);
}

// An explicit prior must certify the requested budget before release.
void RequireCertified(const RunConfig& config, double certified) {
  if (config.epsilon > 0.0 && certified > config.epsilon + kAuditTolerance) {
    throw InfeasibleBudgetError("prior certifies epsilon " + Exact(certified) +
                                ", above the requested " + Exact(config.epsilon));
  }
}

PriorSpec MdPriorFor(const RunConfig& config, size_t groups, int64_t z_total) {
  if (!config.alpha.empty()) {
    return PriorSpec::MultinomialDirichlet(Broadcast(config.alpha, groups, "alpha"));
  }
  RequireEpsilon(config);
  const double alpha = CalibrateMd(config.epsilon, z_total).alpha_min;
  return PriorSpec::MultinomialDirichlet(std::vector<double>(groups, alpha));
}

Json PriorJson(const PriorSpec& prior) {
  Json j;
  if (prior.mode == PriorMode::kMultinomialDirichlet) {
    j["alpha"] = prior.alpha;
  } else {
    j["a"] = prior.a;
    j["b"] = prior.b;
  }
  return j;
}

Strategy StrategyFor(const RunConfig& config) {
  if (config.method == "md") return Strategy::kPosteriorMultinomial;
  if (config.strategy == "lambda") return Strategy::kLambdaThenMultinomial;
  if (config.strategy == "exact") return Strategy::kExactEnumeration2;
  throw UsageError("--strategy must be lambda or exact");
}

int RunCalibrate(const RunConfig& config) {
  Json j = JsonHeader(config);
  j["method"] = config.method;
  j["epsilon"] = config.epsilon;
  RequireEpsilon(config);
  if (config.method == "md") {
    int64_t z_total = config.z_total;
    if (z_total <= 0 && !config.input_path.empty()) z_total = IngestCounts(config.input_path).total;
    if (z_total <= 0) throw UsageError("md calibration needs --z-total or --input");
    const MdCalibration cal = CalibrateMd(config.epsilon, z_total);
    j["z_total"] = cal.z_total;
    j["alpha_min"] = cal.alpha_min;
    j["certified_epsilon"] = MdEpsilonFor(std::vector<double>{cal.alpha_min}, z_total);
    j["converged"] = true;
  } else if (config.method == "pg") {
    CountDataset data;
    if (!config.input_path.empty()) {
      data = IngestCounts(config.input_path);
    } else if (!config.populations.empty() && config.y_total > 0) {
      std::vector<int64_t> counts(config.populations.size(), 0);
      counts[0] = config.y_total;
      data = CountDataset::Create(std::move(counts), config.populations);
    } else {
      throw UsageError("pg calibration needs --input, or --populations with --y-total");
    }
    const auto targets = TargetsFor(config, data);
    const PgCalibration cal = CalibratePg(config.epsilon, data, targets, RuleFor(config));
    j["z_total"] = cal.z_total;
    j["target_rule"] = TargetRuleName(cal.rule);
    j["converged"] = cal.converged;
    j["iterations"] = cal.iterations;
    j["certified_epsilon"] = PgEpsilonFor(cal.a_min, cal.b, data.populations, cal.y_total);
    Json groups = Json::array();
    for (size_t i = 0; i < data.size(); ++i) {
      Json g;
      g["group_id"] = data.group_ids[i];
      g["target_rate"] = cal.target_rates[i];
      g["a_min"] = cal.a_min[i];
      g["b"] = cal.b[i];
      g["nu"] = cal.nu[i];
      g["r"] = cal.r[i];
      groups.push_back(g);
    }
    j["groups"] = groups;
  } else {
    throw UsageError("--method must be md or pg for calibrate");
  }
  WriteText(config.output_path, DumpJson(j));
  return kExitOk;
}

int RunSynthesize(const RunConfig& config) {
  if (config.input_path.empty()) throw UsageError("synthesize needs --input");
  if (config.output_path.empty()) throw UsageError("synthesize needs --out (file prefix)");
  if (config.m_datasets < 1) throw UsageError("--m must be at least 1");
  const CountDataset data = IngestCounts(config.input_path);
  const Strategy strategy = StrategyFor(config);
  PriorSpec prior;
  if (config.method == "md") {
    prior = MdPriorFor(config, data.size(), data.total);
    RequireCertified(config, MdEpsilonFor(prior.alpha, data.total));
  } else if (config.method == "pg") {
    prior = PgPriorFor(config, data);
    RequireCertified(config, PgEpsilonFor(prior.a, prior.b, data.populations, data.total));
  } else {
    throw UsageError("--method must be md or pg for synthesize");
  }

  Json provenance = JsonHeader(config);
  provenance["method"] = config.method;
  provenance["requested_epsilon"] = config.epsilon;
  provenance["strategy"] = StrategyName(strategy);
  provenance["prior"] = PriorJson(prior);
  if (config.method == "pg") {
    // The budget is certified for each pair of groups; no joint proof for I > 2.
    provenance["calibration_scope"] = data.size() > 2 ? "pairwise" : "exact";
  }
  Json releases = Json::array();
  double certified = 0.0;
  const std::string stem = config.output_path.substr(config.output_path.find_last_of('/') + 1);
  for (int64_t k = 1; k <= config.m_datasets; ++k) {
    RngStream rng(config.seed, StreamId({static_cast<uint64_t>(k)}));
    const SyntheticDataset release = config.method == "md"
                                         ? MdSynthesize(data, prior, rng)
                                         : PgSynthesize(data, prior, strategy, rng);
    certified = release.provenance.epsilon;
    std::string text = CsvPreamble(config);
    text += "group_id,replicate,z\n";
    for (size_t i = 0; i < data.size(); ++i) {
      text += data.group_ids[i] + "," + std::to_string(k) + "," +
              std::to_string(release.counts[i]) + "\n";
    }
    const std::string suffix = "_m" + std::to_string(k) + ".csv";
    WriteText(config.output_path + suffix, text);
    Json r;
    r["replicate"] = k;
    r["file"] = stem + suffix;
    r["stream_id"] = release.provenance.stream_id;
    releases.push_back(r);
  }
  provenance["certified_epsilon"] = certified;
  provenance["releases"] = releases;
  WriteText(config.output_path + ".provenance.json", DumpJson(provenance));
  return kExitOk;
}

int RunAudit(const RunConfig& config) {
  RequireEpsilon(config);
  if (config.y_total < 1) throw UsageError("audit needs --y-total >= 1");
  AuditMechanism mechanism;
  PriorSpec prior;
  Pair populations{1.0, 1.0};
  if (config.method == "md") {
    mechanism = AuditMechanism::kMd;
    prior = MdPriorFor(config, 2, config.y_total);
  } else if (config.method == "pg" || config.method == "pg-exact") {
    mechanism = config.method == "pg" ? AuditMechanism::kPg2 : AuditMechanism::kPg2Exact;
    if (!config.populations.empty()) {
      const auto n = Broadcast(config.populations, 2, "populations");
      populations = {n[0], n[1]};
    }
    const CountDataset data = CountDataset::Create({config.y_total, 0},
                                                   {populations[0], populations[1]});
    RunConfig adjusted = config;
    if (mechanism == AuditMechanism::kPg2Exact) adjusted.integer_a = true;
    prior = PgPriorFor(adjusted, data);
  } else {
    throw UsageError("--method must be md, pg or pg-exact for audit");
  }
  const AuditReport report =
      AuditSynthesizer(mechanism, prior, populations, config.epsilon, config.y_total);
  Json j = JsonHeader(config);
  j["mechanism"] = AuditMechanismName(report.mechanism);
  j["epsilon_target"] = report.epsilon_target;
  j["max_abs_log_ratio"] = report.max_abs_log_ratio;
  j["witness"] = {{"y", report.witness.y}, {"x", report.witness.x}, {"z", report.witness.z}};
  j["satisfied"] = report.satisfied;
  j["instances_checked"] = report.instances_checked;
  j["max_route_gap"] = report.max_route_gap;
  j["routes_agree"] = report.routes_agree;
  j["prior"] = PriorJson(prior);
  j["populations"] = populations;
  WriteText(config.output_path, DumpJson(j));
  return report.satisfied && report.routes_agree ? kExitOk : kExitFailed;
}

int RunSimulate(const RunConfig& config) {
  StudyConfig study;
  study.epsilons = config.epsilons;
  study.replicates = config.replicates;
  study.seed = config.seed;
  study.workers = config.workers;
  study.sanitize_epsilon = config.sanitize_epsilon;
  if (config.state_targets == "observed") {
    study.state_targets = StateTargets::kObserved;
  } else if (config.state_targets == "true") {
    study.state_targets = StateTargets::kTrue;
  } else if (config.state_targets == "sanitized") {
    study.state_targets = StateTargets::kSanitized;
  } else {
    throw UsageError("--state-targets must be observed, true or sanitized");
  }
  const auto names = config.scenarios.empty() ? ScenarioNames() : config.scenarios;
  std::optional<CountDataset> input;
  if (!config.input_path.empty()) input = IngestCounts(config.input_path);
  for (const std::string& name : names) {
    Scenario s = Scenario::Named(name);
    s.seed = config.seed;
    s.pop_sigma = config.pop_sigma;
    s.rate_sigma = config.rate_sigma;
    if (input) {
      s.name = "input:" + name;
      s.populations = input->populations;
      s.state_labels = input->state_ids;
      s.y_total = config.y_total > 0 ? config.y_total : input->total;
    } else {
      s.groups = config.groups;
      s.n_total = config.n_total;
      s.states = config.states;
      s.y_total = config.y_total > 0 ? config.y_total : 1000;
    }
    study.scenarios.push_back(s);
  }
  const auto results = RunStudy(study);
  std::string text = CsvPreamble(config);
  text += "# urban: top population quintile; region_contrast: state 1 over state 2\n";
  text += "scenario,method,epsilon,metric,value,lo,hi\n";
  for (const StudyResult& r : results) {
    const std::string lead =
        r.scenario + "," + StudyMethodName(r.method) + "," + Short(r.epsilon) + ",";
    text += lead + "feasible," + (r.feasible ? "1" : "0") + ",,\n";
    if (!r.feasible) continue;
    const std::pair<const char*, const MetricSummary*> metrics[] = {
        {"rmse", &r.rmse},
        {"urban_rate", &r.urban_rate},
        {"rural_rate", &r.rural_rate},
        {"region_contrast", &r.region_contrast}};
    for (const auto& [name, m] : metrics) {
      text += lead + name + "," + Short(m->mean) + "," + Short(m->lo) + "," + Short(m->hi) + "\n";
    }
  }
  WriteText(config.output_path, text);
  return kExitOk;
}

int RunLemmaCheck(const RunConfig& config) {
  if (config.max_c < 1 || config.max_z < 1 || config.points < 1) {
    throw UsageError("--max-c, --max-z and --points must be positive");
  }
  RngStream rng(config.seed, kLemmaStream);
  const auto draw = [&] {
    mpq_class v(mpz_class(static_cast<unsigned long>(1 + rng.NextU64() % 20)),
                mpz_class(static_cast<unsigned long>(1 + rng.NextU64() % 20)));
    v.canonicalize();
    return v;
  };
  std::string text = CsvPreamble(config);
  text += "c1,c2,z_total,p,q,lhs,rhs,equal\n";
  int64_t failures = 0;
  int64_t checks = 0;
  for (int c1 = 1; c1 <= config.max_c; ++c1) {
    for (int c2 = 1; c2 <= config.max_c; ++c2) {
      for (int z = 1; z <= config.max_z; ++z) {
        for (int k = 0; k < config.points; ++k) {
          const mpq_class p = draw();
          const mpq_class q = draw();
          const Lemma1Result r = Lemma1Check(c1, c2, z, p, q);
          ++checks;
          if (!r.equal) ++failures;
          text += std::to_string(c1) + "," + std::to_string(c2) + "," + std::to_string(z) +
                  "," + p.get_str() + "," + q.get_str() + "," + r.lhs.get_str() + "," +
                  r.rhs.get_str() + "," + (r.equal ? "true" : "false") + "\n";
        }
      }
    }
  }
  text += "# checks: " + std::to_string(checks) + ", failures: " + std::to_string(failures) + "\n";
  WriteText(config.output_path, text);
  return failures == 0 ? kExitOk : kExitFailed;
}

int RunBoundSweep(const RunConfig& config) {
  if (config.max_total < 1 || config.max_a < 1) {
    throw UsageError("--max-total and --max-a must be positive");
  }
  const auto grid = DefaultBoundGrid(config.max_total, config.max_a);
  const auto rows = BoundAccuracySweep(grid);
  const SlackSummary summary = SummarizeSlack(rows);
  std::string text = CsvPreamble(config);
  text += "y1,y2,a1,a2,r1,z_total,donor,log_ratio_c,bound,slack,path,status\n";
  for (const BoundAccuracyRow& row : rows) {
    const BoundInstance& in = row.instance;
    text += std::to_string(in.y[0]) + "," + std::to_string(in.y[1]) + "," + Short(in.a[0]) +
            "," + Short(in.a[1]) + "," + std::to_string(in.r_num) + "/" +
            std::to_string(in.r_den) + "," + std::to_string(in.y[0] + in.y[1]) + ",";
    if (row.skipped) {
      text += ",,,,,skipped: " + row.skip_reason + "\n";
      continue;
    }
    text += std::to_string(row.donor + 1) + "," + Short(row.exact_log_ratio_c) + "," +
            Short(row.bound) + "," + Short(row.slack) + "," +
            (row.exact_path ? "exact" : "float") + ",ok\n";
  }
  text += "# rows: " + std::to_string(summary.rows) + ", skipped: " +
          std::to_string(summary.skipped) + "\n";
  text += "# slack min/median/max: " + Short(summary.min) + " " + Short(summary.median) + " " +
          Short(summary.max) + "\n";
  WriteText(config.output_path, text);
  return summary.rows > 0 && summary.min >= -1e-12 ? kExitOk : kExitFailed;
}

}  // namespace

const char* CommandName(Command c) {
  switch (c) {
    case Command::kCalibrate:
      return "calibrate";
    case Command::kSynthesize:
      return "synthesize";
    case Command::kAudit:
      return "audit";
    case Command::kSimulate:
      return "simulate";
    case Command::kLemmaCheck:
      return "lemma-check";
    case Command::kBoundSweep:
      return "bound-sweep";
  }
  return "unknown";
}

Command ParseCommand(const std::string& name) {
  for (Command c : {Command::kCalibrate, Command::kSynthesize, Command::kAudit,
                    Command::kSimulate, Command::kLemmaCheck, Command::kBoundSweep}) {
    if (name == CommandName(c)) return c;
  }
  throw UsageError("unknown command: " + name);
}

void RunConfig::Validate() const {
  if (command == Command::kSynthesize && input_path.empty()) {
    throw UsageError("synthesize needs --input");
  }
  if (m_datasets < 1) throw UsageError("--m must be at least 1");
  if (workers < 1) throw UsageError("--workers must be at least 1");
}

uint64_t DefaultSeed() {
  const char* env = std::getenv("DPSYNTH_SEED");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') throw UsageError("DPSYNTH_SEED must be an integer");
  return v;
}

std::vector<std::pair<std::string, std::string>> ConfigEntries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("command", CommandName(c.command));
  e.emplace_back("seed", std::to_string(c.seed));
  if (!c.input_path.empty()) e.emplace_back("input", c.input_path);
  const auto prior_keys = [&] {
    if (!c.alpha.empty()) e.emplace_back("alpha", JoinDoubles(c.alpha));
    if (!c.a.empty()) e.emplace_back("a", JoinDoubles(c.a));
    if (!c.target_rates.empty()) e.emplace_back("target-rates", JoinDoubles(c.target_rates));
    e.emplace_back("target", c.target);
    e.emplace_back("integer-a", c.integer_a ? "true" : "false");
  };
  switch (c.command) {
    case Command::kCalibrate:
      e.emplace_back("method", c.method);
      e.emplace_back("epsilon", Exact(c.epsilon));
      if (c.z_total > 0) e.emplace_back("z-total", std::to_string(c.z_total));
      if (c.y_total > 0) e.emplace_back("y-total", std::to_string(c.y_total));
      if (!c.populations.empty()) e.emplace_back("populations", JoinDoubles(c.populations));
      if (!c.target_rates.empty()) e.emplace_back("target-rates", JoinDoubles(c.target_rates));
      e.emplace_back("target", c.target);
      break;
    case Command::kSynthesize:
      e.emplace_back("method", c.method);
      e.emplace_back("epsilon", Exact(c.epsilon));
      e.emplace_back("m", std::to_string(c.m_datasets));
      e.emplace_back("strategy", c.strategy);
      prior_keys();
      break;
    case Command::kAudit:
      e.emplace_back("method", c.method);
      e.emplace_back("epsilon", Exact(c.epsilon));
      e.emplace_back("y-total", std::to_string(c.y_total));
      if (!c.populations.empty()) e.emplace_back("populations", JoinDoubles(c.populations));
      prior_keys();
      break;
    case Command::kSimulate:
      if (!c.scenarios.empty()) {
        e.emplace_back("scenario", Join(c.scenarios, [](const std::string& s) { return s; }));
      }
      e.emplace_back("groups", std::to_string(c.groups));
      if (c.y_total > 0) e.emplace_back("y-total", std::to_string(c.y_total));
      e.emplace_back("n-total", Exact(c.n_total));
      e.emplace_back("states", std::to_string(c.states));
      e.emplace_back("replicates", std::to_string(c.replicates));
      e.emplace_back("epsilons", JoinDoubles(c.epsilons));
      e.emplace_back("state-targets", c.state_targets);
      e.emplace_back("sanitize-epsilon", Exact(c.sanitize_epsilon));
      e.emplace_back("pop-sigma", Exact(c.pop_sigma));
      e.emplace_back("rate-sigma", Exact(c.rate_sigma));
      break;
    case Command::kLemmaCheck:
      e.emplace_back("max-c", std::to_string(c.max_c));
      e.emplace_back("max-z", std::to_string(c.max_z));
      e.emplace_back("points", std::to_string(c.points));
      break;
    case Command::kBoundSweep:
      e.emplace_back("max-total", std::to_string(c.max_total));
      e.emplace_back("max-a", std::to_string(c.max_a));
      break;
  }
  return e;
}

CountDataset ParseCounts(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    header = Split(line, ',');
    break;
  }
  if (header.empty()) throw ParseError("missing header", line_no);
  const char* required[] = {"group_id", "state_id", "population", "count"};
  size_t column[4];
  for (size_t k = 0; k < 4; ++k) {
    size_t found = header.size();
    for (size_t h = 0; h < header.size(); ++h) {
      if (Trim(header[h]) == required[k]) found = h;
    }
    if (found == header.size()) {
      throw ParseError(std::string("missing column ") + required[k], line_no);
    }
    column[k] = found;
  }

  std::vector<int64_t> counts;
  std::vector<double> populations;
  std::vector<std::string> groups;
  std::vector<std::string> states;
  std::set<std::string> seen;
  bool any_state = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    const auto fields = Split(line, ',');
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const std::string group = Trim(fields[column[0]]);
    const std::string state = Trim(fields[column[1]]);
    const std::string pop_text = Trim(fields[column[2]]);
    const std::string count_text = Trim(fields[column[3]]);
    if (group.empty()) throw ParseError("empty group_id", line_no);
    if (!seen.insert(group).second) throw ParseError("duplicate group_id " + group, line_no);
    size_t used = 0;
    double population = 0.0;
    int64_t count = 0;
    try {
      population = std::stod(pop_text, &used);
      if (used != pop_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("population is not a number: " + pop_text, line_no);
    }
    try {
      count = std::stoll(count_text, &used);
      if (used != count_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("count is not an integer: " + count_text, line_no);
    }
    if (!(population > 0.0) || !std::isfinite(population)) {
      throw ParseError("population must be positive", line_no);
    }
    if (count < 0) throw ParseError("count must be non-negative", line_no);
    any_state = any_state || !state.empty();
    groups.push_back(group);
    states.push_back(state);
    populations.push_back(population);
    counts.push_back(count);
  }
  if (any_state && std::count(states.begin(), states.end(), "") > 0) {
    throw ParseError("state_id must be given for every row or none", line_no);
  }
  if (!any_state) states.clear();
  try {
    return CountDataset::Create(std::move(counts), std::move(populations), std::move(groups),
                                std::move(states));
  } catch (const Error& err) {
    throw ParseError(err.what(), 0);
  }
}

CountDataset IngestCounts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input: " + path);
  return ParseCounts(in);
}

void EmitCounts(std::ostream& out, const CountDataset& data) {
  out << "group_id,state_id,population,count\n";
  for (size_t i = 0; i < data.size(); ++i) {
    out << data.group_ids[i] << ',' << (data.has_states() ? data.state_ids[i] : "") << ','
        << Exact(data.populations[i]) << ',' << data.counts[i] << '\n';
  }
}

int Run(const RunConfig& config, std::ostream& log) {
  try {
    config.Validate();
    if (!config.isa.empty()) {
      if (config.isa == "scalar") {
        kernels::ForceIsa(kernels::Isa::kScalar);
      } else if (config.isa == "avx2") {
        kernels::ForceIsa(kernels::Isa::kAvx2);
      } else if (config.isa == "neon") {
        kernels::ForceIsa(kernels::Isa::kNeon);
      } else {
        throw UsageError("--isa must be scalar, avx2 or neon");
      }
    }
    switch (config.command) {
      case Command::kCalibrate:
        return RunCalibrate(config);
      case Command::kSynthesize:
        return RunSynthesize(config);
      case Command::kAudit:
        return RunAudit(config);
      case Command::kSimulate:
        return RunSimulate(config);
      case Command::kLemmaCheck:
        return RunLemmaCheck(config);
      case Command::kBoundSweep:
        return RunBoundSweep(config);
    }
  } catch (const InfeasibleBudgetError& err) {
    log << "infeasible: " << err.what() << "\n";
    return kExitInfeasible;
  } catch (const ParseError& err) {
    log << "parse error: " << err.what() << "\n";
    return kExitIo;
  } catch (const IoError& err) {
    log << "i/o error: " << err.what() << "\n";
    return kExitIo;
  } catch (const std::exception& err) {
    log << "error: " << err.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}

std::optional<RunConfig> ParseCommandLine(int argc, const char* const* argv,
                                          std::ostream& out) {
  RunConfig c;
  c.seed = DefaultSeed();
  CLI::App app{"Differentially private synthesizers for small-area count data"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  std::string command;
  app.add_option("command", command, "calibrate | synthesize | audit | simulate | lemma-check | bound-sweep")
      ->required()
      ->check(CLI::IsMember(
          {"calibrate", "synthesize", "audit", "simulate", "lemma-check", "bound-sweep"}));
  app.add_option("-i,--input", c.input_path, "counts CSV (group_id,state_id,population,count)");
  app.add_option("-o,--out", c.output_path, "output file (synthesize: file prefix)");
  app.add_option("--method", c.method, "md | pg (audit also pg-exact)");
  app.add_option("--epsilon", c.epsilon, "privacy budget");
  app.add_option("--z-total", c.z_total, "synthetic total");
  app.add_option("--y-total", c.y_total, "observed total");
  app.add_option("--m", c.m_datasets, "number of synthetic releases");
  app.add_option("--seed", c.seed, "master seed (default $DPSYNTH_SEED or 1)");
  app.add_option("--strategy", c.strategy, "pg sampling: lambda | exact");
  app.add_option("--target", c.target, "pg smoothing target: national | state");
  app.add_option("--alpha", c.alpha, "Dirichlet parameters (one value or one per group)")
      ->delimiter(',');
  app.add_option("--a", c.a, "gamma shapes (one value or one per group)")->delimiter(',');
  app.add_option("--populations", c.populations, "group populations")->delimiter(',');
  app.add_option("--target-rates", c.target_rates, "prior mean rates a/b")->delimiter(',');
  app.add_flag("--integer-a", c.integer_a, "round shapes up to integers");
  app.add_option("--scenario", c.scenarios,
                 "uniform | heterogeneous-n | heterogeneous-rate | heterogeneous-both")
      ->delimiter(',');
  app.add_option("--groups", c.groups, "simulated groups");
  app.add_option("--n-total", c.n_total, "simulated total population");
  app.add_option("--states", c.states, "simulated states");
  app.add_option("--replicates", c.replicates, "replicate datasets per scenario");
  app.add_option("--epsilons", c.epsilons, "epsilon grid")->delimiter(',');
  app.add_option("--state-targets", c.state_targets, "observed | true | sanitized");
  app.add_option("--sanitize-epsilon", c.sanitize_epsilon, "noise budget for sanitized targets");
  app.add_option("--pop-sigma", c.pop_sigma, "log-normal population spread");
  app.add_option("--rate-sigma", c.rate_sigma, "log-normal rate spread");
  app.add_option("--workers", c.workers, "simulation threads");
  app.add_option("--isa", c.isa, "scalar | avx2 | neon");
  app.add_option("--max-c", c.max_c, "lemma-check: largest c1, c2");
  app.add_option("--max-z", c.max_z, "lemma-check: largest total");
  app.add_option("--points", c.points, "lemma-check: random points per case");
  app.add_option("--max-total", c.max_total, "bound-sweep: largest total");
  app.add_option("--max-a", c.max_a, "bound-sweep: largest integer shape");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return std::nullopt;
  } catch (const CLI::ParseError& err) {
    throw UsageError(err.what());
  }
  c.command = ParseCommand(command);
  return c;
}

int RunMain(int argc, const char* const* argv) {
  try {
    const auto config = ParseCommandLine(argc, argv, std::cout);
    if (!config) return kExitOk;
    return Run(*config, std::cerr);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitIo;
  }
}

}  // namespace dpsynth
