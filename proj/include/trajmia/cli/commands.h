// Copyright 2026 The trajmia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJMIA_CLI_COMMANDS_H_
#define TRAJMIA_CLI_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trajmia/attack/config.h"
#include "trajmia/error.h"

namespace trajmia::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMissingArtifact = 3;
inline constexpr int kExitNumerical = 4;

int ExitCodeFor(ErrorCode code);

enum class OutputFormat { kJson, kCsv };

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<uint64_t> seed;
  int jobs = 1;
  std::optional<std::vector<std::string>> baselines;
  OutputFormat format = OutputFormat::kJson;
};

struct StageOptions {
  std::string stage;  // stage name or "baseline:<kind>"
  std::filesystem::path out;
  OutputFormat format = OutputFormat::kJson;
};

struct SweepOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::string axis;
  std::vector<std::string> values;
  std::vector<uint64_t> seeds;
  int jobs = 1;
  std::optional<std::vector<std::string>> baselines;
  OutputFormat format = OutputFormat::kCsv;
};

// Each returns an exit code; diagnostics go to the log and stderr, results
// to `out` (stdout in the tool).
int CmdRun(const RunOptions& options, std::ostream& out);
int CmdStage(const StageOptions& options, std::ostream& out);
int CmdSweep(const SweepOptions& options, std::ostream& out);

// Config keys an axis name assigns; throws kParse for unknown axes.
// Named axes: train_size, distill_size, distill_epochs, dp_noise; any
// config key is also accepted.
std::vector<std::string> AxisKeys(const std::string& axis);
void ApplyAxis(attack::ExperimentConfig& cfg, const std::string& axis,
               const std::string& value);

}  // namespace trajmia::cli

#endif  // TRAJMIA_CLI_COMMANDS_H_
