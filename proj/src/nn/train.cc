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

#include "trajmia/nn/train.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace trajmia::nn {

void ValidateTrainConfig(const TrainConfig& cfg) {
  Require(cfg.epochs >= 1, "epochs must be >= 1");
  Require(cfg.batch_size >= 1, "batch_size must be >= 1");
  Require(cfg.learning_rate >= 0.0 && std::isfinite(cfg.learning_rate),
          "learning_rate must be finite and non-negative");
  Require(cfg.momentum >= 0.0 && cfg.momentum < 1.0,
          "momentum must lie in [0, 1)");
  Require(cfg.weight_decay >= 0.0, "weight_decay must be non-negative");
  Require(cfg.snapshot_every >= 0, "snapshot_every must be non-negative");
}

std::string CanonicalString(const TrainConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "epochs=%d batch=%d lr=%.17g momentum=%.17g wd=%.17g "
                "schedule=%s seed=%llu snapshot_every=%d",
                cfg.epochs, cfg.batch_size, cfg.learning_rate, cfg.momentum,
                cfg.weight_decay,
                cfg.schedule == Schedule::kCosine ? "cosine" : "constant",
                static_cast<unsigned long long>(cfg.seed), cfg.snapshot_every);
  return buf;
}

void ValidateDpConfig(const DpConfig& dp) {
  Require(dp.clip_bound > 0.0, "clip_bound must be positive");
  Require(dp.noise_multiplier >= 0.0, "noise_multiplier must be >= 0");
}

double LearningRateAt(const TrainConfig& cfg, double progress) {
  if (cfg.schedule == Schedule::kConstant) return cfg.learning_rate;
  progress = std::clamp(progress, 0.0, 1.0);
  return cfg.learning_rate * 0.5 *
         (1.0 + std::cos(std::numbers::pi * progress));
}

Optimizer::Optimizer(const MlpModel& model, const TrainConfig& cfg)
    : momentum_(cfg.momentum), weight_decay_(cfg.weight_decay) {
  for (int i = 0; i < model.num_layers(); ++i) {
    velocity_.weights.push_back(
        MatrixF::Zero(model.weights[i].rows(), model.weights[i].cols()));
    velocity_.biases.push_back(Vector<float>::Zero(model.biases[i].size()));
  }
}

void Optimizer::Step(MlpModel& model, const Gradients<float>& grads,
                     double lr) {
  const float mu = static_cast<float>(momentum_);
  const float wd = static_cast<float>(weight_decay_);
  const float step = static_cast<float>(lr);
  auto update = [&](auto& param, const auto& grad, auto& velocity) {
    auto g = (grad + wd * param).eval();
    velocity = mu * velocity + g;
    param -= step * (g + mu * velocity);
  };
  for (int i = 0; i < model.num_layers(); ++i) {
    update(model.weights[i], grads.weights[i], velocity_.weights[i]);
    update(model.biases[i], grads.biases[i], velocity_.biases[i]);
  }
}

double DpBatchGradient(const MlpModel& model, const MatrixF& batch,
                       const LossTarget<float>& target, const DpConfig& dp,
                       Rng& rng, Gradients<float>* grads,
                       std::vector<double>* clipped_norms) {
  BackwardTape<float> tape = RunBackward<float>(model, batch, target);
  const std::vector<double> norms = PerExampleGradientNorms(tape);
  std::vector<float> scale(norms.size());
  for (size_t r = 0; r < norms.size(); ++r) {
    scale[r] = norms[r] > dp.clip_bound
                   ? static_cast<float>(dp.clip_bound / norms[r])
                   : 1.0f;
  }
  if (clipped_norms != nullptr) {
    clipped_norms->resize(norms.size());
    for (size_t r = 0; r < norms.size(); ++r) {
      (*clipped_norms)[r] = norms[r] * scale[r];
    }
  }
  *grads = MeanGradients<float>(tape, scale);
  if (dp.noise_multiplier > 0.0) {
    const double stddev = dp.noise_multiplier * dp.clip_bound /
                          static_cast<double>(batch.rows());
    for (size_t i = 0; i < grads->weights.size(); ++i) {
      MatrixF& w = grads->weights[i];
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        w.data()[k] += static_cast<float>(rng.Normal(0.0, stddev));
      }
      Vector<float>& b = grads->biases[i];
      for (Eigen::Index k = 0; k < b.size(); ++k) {
        b[k] += static_cast<float>(rng.Normal(0.0, stddev));
      }
    }
  }
  double total = 0.0;
  for (double l : tape.losses) total += l;
  return total / static_cast<double>(tape.losses.size());
}

TrainResult TrainOnTargets(MlpModel model, const MatrixF& features,
                           const LossTarget<float>& target,
                           const TrainConfig& cfg,
                           const std::optional<DpConfig>& dp,
                           const EpochHook& hook) {
  ValidateTrainConfig(cfg);
  ValidateModel(model);
  if (dp) ValidateDpConfig(*dp);
  const Eigen::Index n = features.rows();
  Require(n > 0, "cannot train on an empty dataset");
  Require(features.cols() == model.input_dim(),
          "feature width does not match model input dim");
  if (target.kind == LossKind::kCrossEntropy) {
    Require(static_cast<Eigen::Index>(target.labels.size()) == n,
            "label count does not match feature rows");
  } else {
    Require(target.teacher != nullptr && target.teacher->rows() == n &&
                target.teacher->cols() == model.num_classes(),
            "teacher table does not match feature rows");
  }

  Rng shuffle_rng(DeriveSeed(cfg.seed, "shuffle"));
  Rng noise_rng(DeriveSeed(cfg.seed, "dp_noise"));
  Optimizer optimizer(model, cfg);

  const Eigen::Index batch_size = std::min<Eigen::Index>(cfg.batch_size, n);
  const Eigen::Index steps_per_epoch = (n + batch_size - 1) / batch_size;
  const double total_steps =
      static_cast<double>(steps_per_epoch) * static_cast<double>(cfg.epochs);

  TrainResult result;
  MatrixF batch;
  MatrixF batch_teacher;
  std::vector<int> batch_labels;
  Gradients<float> grads;
  int64_t step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<size_t> order = shuffle_rng.Permutation(n);
    double loss_sum = 0.0;
    for (Eigen::Index b = 0; b < steps_per_epoch; ++b) {
      const Eigen::Index begin = b * batch_size;
      const Eigen::Index rows = std::min(batch_size, n - begin);
      batch.resize(rows, features.cols());
      for (Eigen::Index r = 0; r < rows; ++r) {
        batch.row(r) = features.row(order[begin + r]);
      }
      LossTarget<float> batch_target;
      if (target.kind == LossKind::kCrossEntropy) {
        batch_labels.resize(rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
          batch_labels[r] = target.labels[order[begin + r]];
        }
        batch_target = LossTarget<float>::CrossEntropy(batch_labels);
      } else {
        batch_teacher.resize(rows, target.teacher->cols());
        for (Eigen::Index r = 0; r < rows; ++r) {
          batch_teacher.row(r) = target.teacher->row(order[begin + r]);
        }
        batch_target = LossTarget<float>::Kl(batch_teacher);
      }

      const double lr =
          LearningRateAt(cfg, static_cast<double>(step) / total_steps);
      const double loss =
          dp ? DpBatchGradient(model, batch, batch_target, *dp, noise_rng,
                               &grads)
             : Backward<float>(model, batch, batch_target, &grads);
      if (!std::isfinite(loss)) {
        Fail(ErrorCode::kNumerical, "non-finite loss at epoch " +
                                        std::to_string(epoch + 1) +
                                        ", batch " + std::to_string(b));
      }
      optimizer.Step(model, grads, lr);
      if (!model.AllFinite()) {
        Fail(ErrorCode::kNumerical, "non-finite parameters after epoch " +
                                        std::to_string(epoch + 1) +
                                        ", batch " + std::to_string(b));
      }
      loss_sum += loss * static_cast<double>(rows);
      ++step;
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(n));
    if (cfg.snapshot_every > 0 && (epoch + 1) % cfg.snapshot_every == 0) {
      result.snapshots.push_back({epoch + 1, model});
    }
    if (hook) hook(epoch + 1, model);
  }
  result.model = std::move(model);
  return result;
}

TrainResult Train(MlpModel model, const data::FeatureDataset& data,
                  const TrainConfig& cfg, const EpochHook& hook) {
  Require(data.class_count <= model.num_classes(),
          "dataset has more classes than the model outputs");
  return TrainOnTargets(std::move(model), data.features,
                        LossTarget<float>::CrossEntropy(data.labels), cfg,
                        std::nullopt, hook);
}

TrainResult TrainDpSgd(MlpModel model, const data::FeatureDataset& data,
                       const TrainConfig& cfg, const DpConfig& dp,
                       const EpochHook& hook) {
  Require(data.class_count <= model.num_classes(),
          "dataset has more classes than the model outputs");
  return TrainOnTargets(std::move(model), data.features,
                        LossTarget<float>::CrossEntropy(data.labels), cfg, dp,
                        hook);
}

double Accuracy(const MlpModel& model, const data::FeatureDataset& data) {
  if (data.empty()) return 0.0;
  const std::vector<int> predicted = Predict(model, data.features);
  size_t correct = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    correct += predicted[i] == data.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace trajmia::nn
