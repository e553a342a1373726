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

#ifndef TRAJMIA_BASELINES_BASELINES_H_
#define TRAJMIA_BASELINES_BASELINES_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajmia/attack/attack.h"
#include "trajmia/nn/mlp.h"
#include "trajmia/trajectory/trajectory.h"

namespace trajmia::baselines {

enum class Kind {
  kYeomLoss,
  kSalemPosterior,
  kSongMetric,
  kWatsonCalibrated,
  kLoss1,
  kLoss1PlusLossT,
  kLossN,
  kActualShadowTrajectory,
};

inline constexpr Kind kAllKinds[] = {
    Kind::kYeomLoss, Kind::kSalemPosterior, Kind::kSongMetric,
    Kind::kWatsonCalibrated, Kind::kLoss1, Kind::kLoss1PlusLossT,
    Kind::kLossN, Kind::kActualShadowTrajectory};

const char* KindName(Kind kind);
std::optional<Kind> ParseKind(std::string_view name);

// Artifacts (relative to a run directory) each kind reads.
std::vector<std::string> RequiredArtifacts(Kind kind);

// Higher score = more member-like.
std::vector<double> YeomScores(std::span<const double> target_losses);

// Largest k posterior entries per row, descending; zero-padded when C < k.
nn::MatrixF TopKPosteriors(const nn::MatrixD& posteriors, int k = 3);

struct SalemSpec {
  std::vector<int> hidden = {64};
  nn::TrainConfig train = {.epochs = 100,
                           .batch_size = 128,
                           .learning_rate = 0.01,
                           .momentum = 0.9,
                           .weight_decay = 0.0,
                           .schedule = nn::Schedule::kCosine,
                           .seed = 0,
                           .snapshot_every = 0};
};

// Trains a binary MLP on top-3 shadow posteriors (members = 1) and returns
// its member posterior for every target row.
std::vector<double> SalemScores(const nn::MatrixD& shadow_member_post,
                                const nn::MatrixD& shadow_nonmember_post,
                                const nn::MatrixD& target_post,
                                const SalemSpec& spec);

// Modified prediction entropy of a posterior row given the true label.
double ModifiedEntropy(std::span<const double> posterior, int label);

struct SongThresholds {
  std::vector<double> per_class;
  std::vector<bool> calibrated;  // false -> the global threshold is used
  double global = 0.0;
};

// Per-class thresholds on modified entropy (member if entropy <= threshold)
// maximizing balanced accuracy on the shadow data. Classes lacking shadow
// members or non-members fall back to the global threshold.
SongThresholds FitSongThresholds(const nn::MatrixD& member_post,
                                 std::span<const int> member_labels,
                                 const nn::MatrixD& nonmember_post,
                                 std::span<const int> nonmember_labels);

// threshold(label) - modified entropy.
std::vector<double> SongScores(const SongThresholds& thresholds,
                               const nn::MatrixD& target_post,
                               std::span<const int> labels);

// -(target_loss - reference_loss).
std::vector<double> WatsonScores(std::span<const double> target_losses,
                                 std::span<const double> reference_losses);

// Trajectory positions used by the feature-subset variants for an N-epoch
// trajectory (position N is the original model's loss).
std::vector<int> VariantColumns(Kind kind, int n);

// Trains an attack on the given column subset of the shadow-side sets and
// scores the target-side set.
std::vector<double> VariantScores(Kind kind,
                                  const trajectory::TrajectorySet& members,
                                  const trajectory::TrajectorySet& nonmembers,
                                  const trajectory::TrajectorySet& target,
                                  const attack::AttackSpec& spec);

// Epochs of the shadow's own training run that stand in for an N-step
// trajectory: round(i * total / n) for i = 1..n.
std::vector<int> ActualTrajectoryEpochs(int total_epochs, int n);

}  // namespace trajmia::baselines

#endif  // TRAJMIA_BASELINES_BASELINES_H_
