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

#ifndef TRAJMIA_ATTACK_PIPELINE_H_
#define TRAJMIA_ATTACK_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajmia/attack/config.h"
#include "trajmia/baselines/baselines.h"
#include "trajmia/data/split.h"
#include "trajmia/metrics/export.h"

namespace trajmia::attack {

enum class Stage {
  kTrainTarget,
  kTrainShadow,
  kDistillTarget,
  kDistillShadow,
  kTrajectories,
  kTrainAttack,
  kEvaluate,
};

inline constexpr Stage kAllStages[] = {
    Stage::kTrainTarget,   Stage::kTrainShadow,  Stage::kDistillTarget,
    Stage::kDistillShadow, Stage::kTrajectories, Stage::kTrainAttack,
    Stage::kEvaluate};

const char* StageName(Stage stage);
std::optional<Stage> ParseStage(std::string_view name);

// Artifacts a stage reads and writes, relative to the run directory.
std::vector<std::string> StageInputs(Stage stage);
std::vector<std::string> StageOutputs(Stage stage);

// Fixed file names inside a run directory.
namespace artifacts {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kTargetModel = "target/model.bin";
inline constexpr const char* kTargetStats = "target/stats.json";
inline constexpr const char* kShadowModel = "shadow/model.bin";
inline constexpr const char* kShadowStats = "shadow/stats.json";
inline constexpr const char* kShadowEpochs = "shadow/epochs";
inline constexpr const char* kDistillTarget = "distill_target";
inline constexpr const char* kDistillShadow = "distill_shadow";
inline constexpr const char* kShadowMembers = "trajectories/shadow_members.csv";
inline constexpr const char* kShadowNonmembers =
    "trajectories/shadow_nonmembers.csv";
inline constexpr const char* kTargetTrain = "trajectories/target_train.csv";
inline constexpr const char* kTargetTest = "trajectories/target_test.csv";
inline constexpr const char* kAttackModel = "attack_model.bin";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kRocCsv = "roc.csv";
inline constexpr const char* kRocSvg = "roc.svg";
}  // namespace artifacts

// Scores file name for a method ("ours" or a baseline kind).
std::string ScoresFile(std::string_view method);

inline constexpr const char* kOursMethod = "ours";

// Runs the attack pipeline inside one directory, one stage at a time. Every
// stage reads its inputs from disk, so any stage can be re-run alone once
// its upstream artifacts exist.
class Pipeline {
 public:
  // With `data` absent the dataset is loaded or generated from the config.
  Pipeline(ExperimentConfig cfg, std::filesystem::path dir,
           std::shared_ptr<const data::FeatureDataset> data = nullptr);

  const ExperimentConfig& config() const { return cfg_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::string digest() const { return digest_; }

  // Writes config.json.
  void WriteConfig() const;

  // Throws kMissingArtifact naming the first absent input.
  void CheckInputs(Stage stage) const;
  void CheckInputs(baselines::Kind kind) const;
  bool OutputsPresent(Stage stage) const;
  bool OutputsPresent(baselines::Kind kind) const;

  void Run(Stage stage);
  void RunBaseline(baselines::Kind kind);

  // Whether the shadow's own per-epoch snapshots must be kept.
  bool KeepShadowEpochs() const;

  // Split of the experiment dataset (computed once, thread-safe).
  const data::DataSplit& Split() const;

 private:
  std::filesystem::path Path(std::string_view relative) const {
    return dir_ / std::filesystem::path(relative);
  }
  void TrainTarget();
  void TrainShadow();
  void DistillRole(bool target);
  void BuildTrajectories();
  void TrainAttackStage();
  void EvaluateStage();

  ExperimentConfig cfg_;
  std::filesystem::path dir_;
  std::string digest_;
  mutable std::shared_ptr<const data::FeatureDataset> data_;
  mutable std::once_flag split_once_;
  mutable std::unique_ptr<data::DataSplit> split_;
};

// Loads or generates the dataset described by cfg.
data::FeatureDataset LoadExperimentData(const ExperimentConfig& cfg);

// Callbacks around each pipeline step. Steps are named by StageName or
// "baseline:<kind>". Hooks may be called from several threads at once.
struct RunHooks {
  std::function<bool(const std::string& step)> skip;  // true: already done
  std::function<void(const std::string& step)> before;
  std::function<void(const std::string& step, bool ok)> after;
};

// Every stage in order with the configured baselines before evaluation.
// Independent steps run concurrently when jobs > 1; results do not depend
// on jobs.
metrics::RunReport RunPipeline(const ExperimentConfig& cfg,
                               const std::filesystem::path& dir,
                               std::shared_ptr<const data::FeatureDataset> data =
                                   nullptr,
                               int jobs = 1, const RunHooks& hooks = {});

std::string BaselineStep(baselines::Kind kind);

}  // namespace trajmia::attack

#endif  // TRAJMIA_ATTACK_PIPELINE_H_
