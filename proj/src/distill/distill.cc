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

#include "trajmia/distill/distill.h"

#include <cmath>
#include <json.hpp>

#include "trajmia/io.h"
#include "trajmia/nn/losses.h"
#include "trajmia/nn/serialize.h"
#include "trajmia/rng.h"

namespace trajmia::distill {

namespace fs = std::filesystem;
using nlohmann::json;

void ValidateSeries(const SnapshotSeries& series) {
  if (series.snapshots.empty()) {
    Fail(ErrorCode::kCorrupt, "snapshot series is empty");
  }
  const nn::MlpModel& first = series.snapshots.front().model;
  for (size_t i = 0; i < series.snapshots.size(); ++i) {
    const nn::Snapshot& snap = series.snapshots[i];
    if (snap.epoch != static_cast<int>(i) + 1) {
      Fail(ErrorCode::kCorrupt, "snapshot " + std::to_string(i) +
                                    " carries epoch " +
                                    std::to_string(snap.epoch));
    }
    if (snap.model.layer_dims != first.layer_dims ||
        snap.model.activation != first.activation) {
      Fail(ErrorCode::kCorrupt, "snapshot at epoch " +
                                    std::to_string(snap.epoch) +
                                    " has a different architecture");
    }
  }
}

nn::MatrixD CacheTeacherPosteriors(TeacherOracle& oracle,
                                   const data::FeatureDataset& d_k) {
  Require(!d_k.empty(), "distillation set is empty");
  const int classes = oracle.num_classes();
  nn::MatrixD table(static_cast<Eigen::Index>(d_k.size()), classes);
  for (size_t i = 0; i < d_k.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    nn::MatrixD post;
    try {
      post = oracle.Query(d_k.features.row(row));
    } catch (const std::exception& e) {
      Fail(ErrorCode::kInternal, "teacher query failed for sample id " +
                                     std::to_string(d_k.ids[i]) + ": " +
                                     e.what());
    }
    if (post.rows() != 1 || post.cols() != classes || !post.allFinite() ||
        post.minCoeff() < 0.0 || std::abs(post.sum() - 1.0) > 1e-6) {
      Fail(ErrorCode::kInternal, "teacher returned an invalid posterior for "
                                 "sample id " + std::to_string(d_k.ids[i]));
    }
    table.row(row) = post.row(0);
  }
  return table;
}

double MeanKl(const nn::MatrixD& teacher_posteriors,
              const nn::MlpModel& student, const nn::MatrixF& features) {
  const nn::MatrixD student_post = nn::Posteriors(student, features);
  Require(student_post.rows() == teacher_posteriors.rows(),
          "teacher table and features disagree in rows");
  double total = 0.0;
  for (Eigen::Index r = 0; r < student_post.rows(); ++r) {
    total += nn::KlDiv(
        std::span<const double>(teacher_posteriors.row(r).data(),
                                teacher_posteriors.cols()),
        std::span<const double>(student_post.row(r).data(),
                                student_post.cols()));
  }
  return total / static_cast<double>(student_post.rows());
}

DistillResult DistillFromTable(nn::MlpModel student,
                               const data::FeatureDataset& d_k,
                               const nn::MatrixD& teacher_posteriors,
                               const nn::TrainConfig& cfg,
                               const std::string& teacher_tag) {
  Require(cfg.snapshot_every == 1,
          "distillation snapshots every epoch (snapshot_every must be 1)");
  Require(student.input_dim() == d_k.dim(),
          "student input dim does not match distillation features");
  Require(student.num_classes() == teacher_posteriors.cols(),
          "student class count does not match teacher posteriors");
  const nn::MatrixF teacher_f = teacher_posteriors.cast<float>();
  DistillResult result;
  nn::TrainResult trained = nn::TrainOnTargets(
      std::move(student), d_k.features, nn::LossTarget<float>::Kl(teacher_f),
      cfg, std::nullopt, [&](int, const nn::MlpModel& model) {
        result.epoch_kl.push_back(
            MeanKl(teacher_posteriors, model, d_k.features));
      });
  result.series.snapshots = std::move(trained.snapshots);
  result.series.teacher_tag = teacher_tag;
  result.series.config_digest = io::HexDigest(nn::CanonicalString(cfg));
  result.series.seed = cfg.seed;
  result.student = std::move(trained.model);
  ValidateSeries(result.series);
  return result;
}

DistillResult Distill(TeacherOracle& oracle, nn::MlpModel student,
                      const data::FeatureDataset& d_k,
                      const nn::TrainConfig& cfg) {
  Require(cfg.snapshot_every == 1,
          "distillation snapshots every epoch (snapshot_every must be 1)");
  const nn::MatrixD table = CacheTeacherPosteriors(oracle, d_k);
  return DistillFromTable(std::move(student), d_k, table, cfg, oracle.tag());
}

DistillResult Distill(TeacherOracle& oracle,
                      const std::vector<int>& student_dims,
                      nn::Activation activation,
                      const data::FeatureDataset& d_k,
                      const nn::TrainConfig& cfg) {
  nn::MlpModel student =
      nn::MakeMlp(student_dims, activation, DeriveSeed(cfg.seed, "init"));
  return Distill(oracle, std::move(student), d_k, cfg);
}

double Agreement(const nn::MlpModel& a, const nn::MlpModel& b,
                 const data::FeatureDataset& data) {
  if (data.empty()) return 1.0;
  const std::vector<int> pa = nn::Predict(a, data.features);
  const std::vector<int> pb = nn::Predict(b, data.features);
  size_t same = 0;
  for (size_t i = 0; i < pa.size(); ++i) same += pa[i] == pb[i];
  return static_cast<double>(same) / static_cast<double>(pa.size());
}

void SaveSeries(const SnapshotSeries& series, const fs::path& dir) {
  ValidateSeries(series);
  fs::create_directories(dir);
  const nn::MlpModel& first = series.snapshots.front().model;
  json meta = {
      {"teacher", series.teacher_tag},
      {"n", series.length()},
      {"seed", series.seed},
      {"dims", first.layer_dims},
      {"activation", nn::ActivationName(first.activation)},
      {"config_digest", series.config_digest},
  };
  for (const nn::Snapshot& snap : series.snapshots) {
    nn::SaveModel(snap.model, dir / nn::SnapshotFileName(snap.epoch));
  }
  io::WriteText(dir / "meta.json", meta.dump(2) + "\n");
}

SnapshotSeries LoadSeries(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) {
    Fail(ErrorCode::kMissingArtifact, meta_path.string());
  }
  json meta;
  try {
    meta = json::parse(io::ReadText(meta_path));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorrupt, meta_path.string() + ": " + e.what());
  }
  SnapshotSeries series;
  int n = 0;
  std::vector<int> dims;
  try {
    series.teacher_tag = meta.at("teacher").get<std::string>();
    series.seed = meta.at("seed").get<uint64_t>();
    series.config_digest = meta.at("config_digest").get<std::string>();
    n = meta.at("n").get<int>();
    dims = meta.at("dims").get<std::vector<int>>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorrupt, meta_path.string() + ": " + e.what());
  }
  if (n < 1) Fail(ErrorCode::kCorrupt, meta_path.string() + ": n < 1");
  for (int epoch = 1; epoch <= n; ++epoch) {
    const fs::path path = dir / nn::SnapshotFileName(epoch);
    if (!fs::exists(path)) Fail(ErrorCode::kMissingArtifact, path.string());
    series.snapshots.push_back({epoch, nn::LoadModel(path)});
    if (series.snapshots.back().model.layer_dims != dims) {
      Fail(ErrorCode::kCorrupt, path.string() + ": dims differ from meta.json");
    }
  }
  if (fs::exists(dir / nn::SnapshotFileName(n + 1))) {
    Fail(ErrorCode::kCorrupt, dir.string() + ": more snapshots than meta.json n");
  }
  ValidateSeries(series);
  return series;
}

}  // namespace trajmia::distill
