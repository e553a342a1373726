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

#ifndef TRAJMIA_ATTACK_ATTACK_H_
#define TRAJMIA_ATTACK_ATTACK_H_

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "trajmia/nn/mlp.h"
#include "trajmia/nn/train.h"
#include "trajmia/trajectory/trajectory.h"

namespace trajmia::attack {

// Transform applied to every loss before it reaches the classifier. kLog
// maps l to log(l + kLogLossOffset).
enum class FeatureScale : uint8_t { kRaw = 0, kLog = 1 };
inline constexpr double kLogLossOffset = 1e-6;

const char* FeatureScaleName(FeatureScale scale);
FeatureScale ParseFeatureScale(std::string_view name);

struct AttackSpec {
  std::vector<int> hidden = {128, 64, 32};
  nn::TrainConfig train = {.epochs = 100,
                           .batch_size = 128,
                           .learning_rate = 0.01,
                           .momentum = 0.9,
                           .weight_decay = 0.0,
                           .schedule = nn::Schedule::kCosine,
                           .seed = 0,
                           .snapshot_every = 0};
  // Loss positions fed to the classifier; empty means all N + 1.
  std::vector<int> columns;
  bool standardize = false;
  FeatureScale scale = FeatureScale::kRaw;

  bool operator==(const AttackSpec&) const = default;
};

// Binary classifier over (a subset of) a trajectory; class 1 = member.
struct AttackModel {
  int trajectory_n = 0;  // N of the trajectories it was trained on
  std::vector<int> columns;
  FeatureScale scale = FeatureScale::kRaw;
  std::optional<trajectory::Standardizer> standardizer;
  nn::MlpModel model;

  bool operator==(const AttackModel&) const = default;
};

// Column list selecting every loss of an N-epoch trajectory.
std::vector<int> AllColumns(int n);

// Trains on members (label 1) and non-members (label 0). The larger side is
// subsampled to the size of the smaller one.
AttackModel TrainAttack(const trajectory::TrajectorySet& members,
                        const trajectory::TrajectorySet& nonmembers,
                        const AttackSpec& spec);

// Posterior of the member class.
double Infer(const AttackModel& attack, const trajectory::TrajectoryRecord& record);
std::vector<double> Score(const AttackModel& attack,
                          const trajectory::TrajectorySet& set);

// "TMAK" container: version, trajectory N, columns, feature scale, optional
// standardizer,
// then the classifier in the snapshot format.
std::vector<uint8_t> EncodeAttack(const AttackModel& attack);
AttackModel DecodeAttack(const std::vector<uint8_t>& bytes);
void SaveAttack(const AttackModel& attack, const std::filesystem::path& path);
AttackModel LoadAttack(const std::filesystem::path& path);

}  // namespace trajmia::attack

#endif  // TRAJMIA_ATTACK_ATTACK_H_
