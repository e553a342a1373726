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

#ifndef TRAJMIA_NN_TRAIN_H_
#define TRAJMIA_NN_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trajmia/data/dataset.h"
#include "trajmia/nn/backward.h"
#include "trajmia/nn/mlp.h"
#include "trajmia/rng.h"

namespace trajmia::nn {

enum class Schedule { kConstant, kCosine };

struct TrainConfig {
  int epochs = 50;
  int batch_size = 128;
  double learning_rate = 0.1;
  double momentum = 0.9;  // Nesterov
  double weight_decay = 0.0;
  Schedule schedule = Schedule::kCosine;
  uint64_t seed = 0;
  // Emit a snapshot after every k-th epoch; 0 disables snapshots.
  int snapshot_every = 0;

  bool operator==(const TrainConfig&) const = default;
};

// Per-example gradients are clipped to clip_bound in L2 before averaging;
// Gaussian noise of stddev noise_multiplier * clip_bound / batch_size is
// then added to every coordinate of the averaged gradient.
struct DpConfig {
  double clip_bound = 10.0;
  double noise_multiplier = 0.0;

  bool operator==(const DpConfig&) const = default;
};

void ValidateTrainConfig(const TrainConfig& cfg);

// Stable one-line rendering, used for digests.
std::string CanonicalString(const TrainConfig& cfg);
void ValidateDpConfig(const DpConfig& dp);

// Learning rate after `progress` in [0, 1] of the total optimizer steps.
// The cosine schedule decays per step from learning_rate to 0.
double LearningRateAt(const TrainConfig& cfg, double progress);

struct Snapshot {
  int epoch = 0;  // 1-based
  MlpModel model;
};

struct TrainResult {
  MlpModel model;
  std::vector<Snapshot> snapshots;
  std::vector<double> epoch_loss;  // mean training loss per epoch
};

// Optional hook invoked after every epoch with the current parameters.
using EpochHook = std::function<void(int epoch, const MlpModel& model)>;

// Shuffled mini-batch SGD with Nesterov momentum. The final partial batch
// is trained on. Deterministic for a fixed cfg.seed: shuffling and DP noise
// draw from separate substreams. Throws kNumerical when a batch loss or an
// updated parameter is non-finite.
TrainResult TrainOnTargets(MlpModel model, const MatrixF& features,
                           const LossTarget<float>& target,
                           const TrainConfig& cfg,
                           const std::optional<DpConfig>& dp = std::nullopt,
                           const EpochHook& hook = {});

// Cross-entropy training on a labelled dataset.
TrainResult Train(MlpModel model, const data::FeatureDataset& data,
                  const TrainConfig& cfg, const EpochHook& hook = {});

// Cross-entropy training with per-example clipping and Gaussian noise.
TrainResult TrainDpSgd(MlpModel model, const data::FeatureDataset& data,
                       const TrainConfig& cfg, const DpConfig& dp,
                       const EpochHook& hook = {});

// One optimizer step for a batch; exposed so that single updates can be
// compared between the plain and the clipped/noised paths.
class Optimizer {
 public:
  Optimizer(const MlpModel& model, const TrainConfig& cfg);

  // Applies grads with the given learning rate.
  void Step(MlpModel& model, const Gradients<float>& grads, double lr);

 private:
  double momentum_;
  double weight_decay_;
  Gradients<float> velocity_;
};

// Averaged, clipped, noised gradient of one batch; returns the mean batch
// loss. Noise is drawn from rng only when noise_multiplier > 0. When
// clipped_norms is set it receives each sample's gradient norm after
// clipping.
double DpBatchGradient(const MlpModel& model, const MatrixF& batch,
                       const LossTarget<float>& target, const DpConfig& dp,
                       Rng& rng, Gradients<float>* grads,
                       std::vector<double>* clipped_norms = nullptr);

double Accuracy(const MlpModel& model, const data::FeatureDataset& data);

}  // namespace trajmia::nn

#endif  // TRAJMIA_NN_TRAIN_H_
