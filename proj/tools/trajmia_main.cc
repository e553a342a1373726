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

// Command-line front end: trajmia run | stage | sweep | data.

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "trajmia/attack/pipeline.h"
#include "trajmia/cli/commands.h"
#include "trajmia/cli/manifest.h"
#include "trajmia/data/dataset.h"

namespace {

using trajmia::cli::OutputFormat;

void SetUpLogging() {
  auto logger = spdlog::stderr_logger_mt("trajmia");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("TRAJMIA_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

std::vector<std::string> SplitCommas(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t comma = s.find(',', start);
    const std::string item = s.substr(start, comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

const std::map<std::string, OutputFormat> kFormats = {
    {"json", OutputFormat::kJson}, {"csv", OutputFormat::kCsv}};

}  // namespace

int main(int argc, char** argv) {
  SetUpLogging();
  CLI::App app{"Membership inference auditing with distilled loss trajectories"};
  app.set_version_flag("--version", trajmia::cli::kToolVersion);
  app.require_subcommand(1);

  trajmia::cli::RunOptions run;
  std::optional<std::string> run_baselines;
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline");
  run_cmd->add_option("--config", run.config, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Run directory")->required();
  run_cmd->add_option("--seed", run.seed, "Override the root seed");
  run_cmd->add_option("--jobs", run.jobs, "Concurrent pipeline steps")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--baselines", run_baselines,
                      "Comma-separated baseline kinds (overrides the config)");
  run_cmd->add_option("--format", run.format, "Summary format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  trajmia::cli::StageOptions stage;
  auto* stage_cmd = app.add_subcommand("stage", "Run or redo one stage");
  stage_cmd
      ->add_option("name", stage.stage,
                   "train-target | train-shadow | distill-target | "
                   "distill-shadow | trajectories | train-attack | evaluate | "
                   "baseline:<kind>")
      ->required();
  stage_cmd->add_option("--out", stage.out, "Run directory")->required();
  stage_cmd->add_option("--format", stage.format, "Output format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  trajmia::cli::SweepOptions sweep;
  std::string sweep_values;
  std::string sweep_seeds;
  std::optional<std::string> sweep_baselines;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over one config axis");
  sweep_cmd->add_option("--config", sweep.config, "Base experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sweep.out, "Sweep directory")->required();
  sweep_cmd
      ->add_option("--axis", sweep.axis,
                   "train_size | distill_size | distill_epochs | dp_noise | "
                   "<config key>")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
      ->required();
  sweep_cmd->add_option("--seeds", sweep_seeds, "Comma-separated seeds");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Concurrent sweep points")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--baselines", sweep_baselines,
                        "Comma-separated baseline kinds");
  sweep_cmd->add_option("--format", sweep.format, "Summary format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  std::string data_config;
  std::string data_out;
  auto* data_cmd =
      app.add_subcommand("data", "Write the experiment dataset (.csv or .bin)");
  data_cmd->add_option("--config", data_config, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  data_cmd->add_option("--out", data_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : trajmia::cli::kExitConfig;
  }

  if (*run_cmd) {
    if (run_baselines) run.baselines = SplitCommas(*run_baselines);
    return trajmia::cli::CmdRun(run, std::cout);
  }
  if (*stage_cmd) return trajmia::cli::CmdStage(stage, std::cout);
  if (*sweep_cmd) {
    sweep.values = SplitCommas(sweep_values);
    try {
      for (const std::string& s : SplitCommas(sweep_seeds)) {
        sweep.seeds.push_back(std::stoull(s));
      }
    } catch (const std::exception&) {
      spdlog::error("sweep: --seeds must be unsigned integers");
      return trajmia::cli::kExitConfig;
    }
    if (sweep_baselines) sweep.baselines = SplitCommas(*sweep_baselines);
    return trajmia::cli::CmdSweep(sweep, std::cout);
  }
  try {
    const auto cfg = trajmia::attack::LoadConfig(data_config);
    const auto data = trajmia::attack::LoadExperimentData(cfg);
    if (std::filesystem::path(data_out).extension() == ".bin") {
      trajmia::data::SaveBinary(data, data_out);
    } else {
      trajmia::data::SaveCsv(data, data_out);
    }
    spdlog::info("wrote {} rows to {}", data.size(), data_out);
    return 0;
  } catch (const trajmia::Error& e) {
    spdlog::error("data: {}", e.what());
    return trajmia::cli::ExitCodeFor(e.code());
  }
}
