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

#include "trajmia/baselines/baselines.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "trajmia/metrics/metrics.h"
#include "trajmia/nn/losses.h"
#include "trajmia/rng.h"

namespace trajmia::baselines {

const char* KindName(Kind kind) {
  switch (kind) {
    case Kind::kYeomLoss: return "yeom_loss";
    case Kind::kSalemPosterior: return "salem_posterior";
    case Kind::kSongMetric: return "song_metric";
    case Kind::kWatsonCalibrated: return "watson_calibrated";
    case Kind::kLoss1: return "loss1";
    case Kind::kLoss1PlusLossT: return "loss1_plus_losst";
    case Kind::kLossN: return "lossn";
    case Kind::kActualShadowTrajectory: return "actual_shadow_trajectory";
  }
  return "unknown";
}

std::optional<Kind> ParseKind(std::string_view name) {
  for (Kind kind : kAllKinds) {
    if (name == KindName(kind)) return kind;
  }
  return std::nullopt;
}

std::vector<std::string> RequiredArtifacts(Kind kind) {
  switch (kind) {
    case Kind::kYeomLoss:
      return {"trajectories/target_train.csv", "trajectories/target_test.csv"};
    case Kind::kSalemPosterior:
    case Kind::kSongMetric:
      return {"target/model.bin", "shadow/model.bin"};
    case Kind::kWatsonCalibrated:
      return {"trajectories/target_train.csv", "trajectories/target_test.csv",
              "shadow/model.bin"};
    case Kind::kLoss1:
    case Kind::kLoss1PlusLossT:
    case Kind::kLossN:
      return {"trajectories/shadow_members.csv",
              "trajectories/shadow_nonmembers.csv",
              "trajectories/target_train.csv", "trajectories/target_test.csv"};
    case Kind::kActualShadowTrajectory:
      return {"shadow/model.bin", "shadow/epochs/meta.json",
              "trajectories/target_train.csv", "trajectories/target_test.csv"};
  }
  return {};
}

std::vector<double> YeomScores(std::span<const double> target_losses) {
  std::vector<double> scores(target_losses.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    Require(target_losses[i] >= 0.0, "losses must be non-negative");
    scores[i] = -target_losses[i];
  }
  return scores;
}

nn::MatrixF TopKPosteriors(const nn::MatrixD& posteriors, int k) {
  Require(k >= 1, "k must be positive");
  nn::MatrixF out = nn::MatrixF::Zero(posteriors.rows(), k);
  std::vector<double> row;
  for (Eigen::Index r = 0; r < posteriors.rows(); ++r) {
    row.assign(posteriors.row(r).data(),
               posteriors.row(r).data() + posteriors.cols());
    std::sort(row.begin(), row.end(), std::greater<>());
    const int take = std::min<int>(k, static_cast<int>(row.size()));
    for (int j = 0; j < take; ++j) out(r, j) = static_cast<float>(row[j]);
  }
  return out;
}

std::vector<double> SalemScores(const nn::MatrixD& shadow_member_post,
                                const nn::MatrixD& shadow_nonmember_post,
                                const nn::MatrixD& target_post,
                                const SalemSpec& spec) {
  Require(shadow_member_post.rows() > 0 && shadow_nonmember_post.rows() > 0,
          "salem attack needs shadow members and non-members");
  Require(shadow_member_post.cols() == target_post.cols() &&
              shadow_nonmember_post.cols() == target_post.cols(),
          "shadow and target class counts differ");
  constexpr int kTop = 3;
  const nn::MatrixF in = TopKPosteriors(shadow_member_post, kTop);
  const nn::MatrixF out = TopKPosteriors(shadow_nonmember_post, kTop);
  nn::MatrixF features(in.rows() + out.rows(), kTop);
  features << in, out;
  std::vector<int> labels(static_cast<size_t>(features.rows()), 0);
  std::fill(labels.begin(), labels.begin() + in.rows(), 1);

  std::vector<int> dims = {kTop};
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(2);
  nn::MlpModel model = nn::MakeMlp(dims, nn::Activation::kRelu,
                                   DeriveSeed(spec.train.seed, "init"));
  model = nn::TrainOnTargets(std::move(model), features,
                             nn::LossTarget<float>::CrossEntropy(labels),
                             spec.train)
              .model;
  const nn::MatrixD post =
      nn::Posteriors(model, TopKPosteriors(target_post, kTop));
  std::vector<double> scores(static_cast<size_t>(post.rows()));
  for (Eigen::Index r = 0; r < post.rows(); ++r) scores[r] = post(r, 1);
  return scores;
}

double ModifiedEntropy(std::span<const double> posterior, int label) {
  Require(label >= 0 && label < static_cast<int>(posterior.size()),
          "label out of range");
  double total = 0.0;
  for (size_t i = 0; i < posterior.size(); ++i) {
    const double p = posterior[i];
    if (static_cast<int>(i) == label) {
      total -= (1.0 - p) * std::log(p + nn::kLogFloor);
    } else {
      total -= p * std::log(1.0 - p + nn::kLogFloor);
    }
  }
  return std::max(total, 0.0);
}

namespace {

std::vector<double> Entropies(const nn::MatrixD& post,
                              std::span<const int> labels) {
  Require(static_cast<size_t>(post.rows()) == labels.size(),
          "posterior rows and labels differ");
  std::vector<double> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i] = ModifiedEntropy(
        std::span<const double>(post.row(r).data(), post.cols()), labels[i]);
  }
  return out;
}

// Threshold t maximizing balanced accuracy of "member iff entropy <= t".
double BestThreshold(const std::vector<double>& member_entropy,
                     const std::vector<double>& nonmember_entropy) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (double e : member_entropy) {
    scores.push_back(-e);
    labels.push_back(1);
  }
  for (double e : nonmember_entropy) {
    scores.push_back(-e);
    labels.push_back(0);
  }
  return -metrics::MaxBalancedAccuracy(scores, labels).threshold;
}

}  // namespace

SongThresholds FitSongThresholds(const nn::MatrixD& member_post,
                                 std::span<const int> member_labels,
                                 const nn::MatrixD& nonmember_post,
                                 std::span<const int> nonmember_labels) {
  Require(member_post.cols() == nonmember_post.cols(),
          "member and non-member class counts differ");
  const auto classes = static_cast<int>(member_post.cols());
  const std::vector<double> in = Entropies(member_post, member_labels);
  const std::vector<double> out = Entropies(nonmember_post, nonmember_labels);
  Require(!in.empty() && !out.empty(),
          "song calibration needs members and non-members");

  SongThresholds t;
  t.global = BestThreshold(in, out);
  t.per_class.assign(classes, t.global);
  t.calibrated.assign(classes, false);
  std::vector<std::vector<double>> in_by(classes), out_by(classes);
  for (size_t i = 0; i < in.size(); ++i) in_by[member_labels[i]].push_back(in[i]);
  for (size_t i = 0; i < out.size(); ++i) {
    out_by[nonmember_labels[i]].push_back(out[i]);
  }
  for (int c = 0; c < classes; ++c) {
    if (in_by[c].empty() || out_by[c].empty()) continue;
    t.per_class[c] = BestThreshold(in_by[c], out_by[c]);
    t.calibrated[c] = true;
  }
  return t;
}

std::vector<double> SongScores(const SongThresholds& thresholds,
                               const nn::MatrixD& target_post,
                               std::span<const int> labels) {
  const std::vector<double> entropy = Entropies(target_post, labels);
  std::vector<double> scores(entropy.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    const int c = labels[i];
    const double t = c < static_cast<int>(thresholds.per_class.size())
                         ? thresholds.per_class[c]
                         : thresholds.global;
    scores[i] = t - entropy[i];
  }
  return scores;
}

std::vector<double> WatsonScores(std::span<const double> target_losses,
                                 std::span<const double> reference_losses) {
  Require(target_losses.size() == reference_losses.size(),
          "target and reference losses differ in length");
  std::vector<double> scores(target_losses.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    scores[i] = -(target_losses[i] - reference_losses[i]);
  }
  return scores;
}

std::vector<int> VariantColumns(Kind kind, int n) {
  Require(n >= 1, "trajectory length must be positive");
  switch (kind) {
    case Kind::kLoss1:
      return {n - 1};
    case Kind::kLoss1PlusLossT:
      return {n - 1, n};
    case Kind::kLossN: {
      std::vector<int> columns(n);
      for (int i = 0; i < n; ++i) columns[i] = i;
      return columns;
    }
    case Kind::kActualShadowTrajectory:
      return attack::AllColumns(n);
    default:
      Fail(ErrorCode::kInvalidArgument,
           std::string(KindName(kind)) + " is not a trajectory variant");
  }
}

std::vector<double> VariantScores(Kind kind,
                                  const trajectory::TrajectorySet& members,
                                  const trajectory::TrajectorySet& nonmembers,
                                  const trajectory::TrajectorySet& target,
                                  const attack::AttackSpec& spec) {
  attack::AttackSpec variant = spec;
  variant.columns = VariantColumns(kind, members.n);
  const attack::AttackModel model =
      attack::TrainAttack(members, nonmembers, variant);
  return attack::Score(model, target);
}

std::vector<int> ActualTrajectoryEpochs(int total_epochs, int n) {
  Require(n >= 1 && n <= total_epochs,
          "trajectory length must be between 1 and the training epochs");
  std::vector<int> epochs(n);
  for (int i = 1; i <= n; ++i) {
    const int64_t num = 2 * static_cast<int64_t>(i) * total_epochs + n;
    epochs[i - 1] = static_cast<int>(num / (2 * static_cast<int64_t>(n)));
  }
  return epochs;
}

}  // namespace trajmia::baselines
