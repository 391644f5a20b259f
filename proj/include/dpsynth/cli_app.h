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

#ifndef DPSYNTH_CLI_APP_H_
#define DPSYNTH_CLI_APP_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpsynth/types.h"

namespace dpsynth {

inline constexpr char kVersion[] = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitIo = 3;

enum class Command { kCalibrate, kSynthesize, kAudit, kSimulate, kLemmaCheck, kBoundSweep };

const char* CommandName(Command c);
Command ParseCommand(const std::string& name);

struct RunConfig {
  Command command = Command::kCalibrate;
  std::string input_path;
  // File for JSON/CSV outputs (stdout when empty); prefix for synthesize.
  std::string output_path;
  std::string method = "md";
  double epsilon = 0.0;
  int64_t z_total = 0;
  int64_t y_total = 0;
  int64_t m_datasets = 1;
  uint64_t seed = 1;
  std::string strategy = "lambda";
  std::string target = "national";
  std::vector<double> alpha;
  std::vector<double> a;
  std::vector<double> populations;
  std::vector<double> target_rates;
  bool integer_a = false;

  std::vector<std::string> scenarios;
  int64_t groups = 200;
  double n_total = 2.5e6;
  int64_t states = 10;
  int64_t replicates = 50;
  std::vector<double> epsilons{0.5, 1.0, 2.0, 4.0, 8.0};
  std::string state_targets = "observed";
  double sanitize_epsilon = 1.0;
  double pop_sigma = 1.0;
  double rate_sigma = 0.3;
  int workers = 1;
  std::string isa;  // empty keeps the detected instruction set

  int max_c = 4;
  int max_z = 10;
  int points = 5;
  int64_t max_total = 8;
  int64_t max_a = 4;

  void Validate() const;
};

// Seed from DPSYNTH_SEED when set, else 1.
uint64_t DefaultSeed();

// The settings that determine an output, as key=value pairs using the flag
// names. Worker count and paths are left out.
std::vector<std::pair<std::string, std::string>> ConfigEntries(const RunConfig& config);

// Counts CSV with header group_id,state_id,population,count.
CountDataset ParseCounts(std::istream& in);
CountDataset IngestCounts(const std::string& path);
void EmitCounts(std::ostream& out, const CountDataset& data);

// Executes the command and returns the process exit code. Errors are
// reported on `log`.
int Run(const RunConfig& config, std::ostream& log);

// Parses argv with a key=value config file (--config) where flags win.
// Throws UsageError on bad arguments.
std::optional<RunConfig> ParseCommandLine(int argc, const char* const* argv,
                                          std::ostream& out);

int RunMain(int argc, const char* const* argv);

}  // namespace dpsynth

#endif  // DPSYNTH_CLI_APP_H_
