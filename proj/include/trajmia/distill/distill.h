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

#ifndef TRAJMIA_DISTILL_DISTILL_H_
#define TRAJMIA_DISTILL_DISTILL_H_

#include <atomic>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "trajmia/data/dataset.h"
#include "trajmia/nn/mlp.h"
#include "trajmia/nn/train.h"

namespace trajmia::distill {

// Black-box access to a trained classifier: posterior rows out, nothing
// else. Every row submitted counts as one query.
class TeacherOracle {
 public:
  virtual ~TeacherOracle() = default;

  nn::MatrixD Query(const Eigen::Ref<const nn::MatrixF>& features) {
    queries_ += static_cast<size_t>(features.rows());
    return DoQuery(features);
  }

  size_t query_count() const { return queries_.load(); }
  virtual int num_classes() const = 0;
  virtual std::string tag() const = 0;

 protected:
  virtual nn::MatrixD DoQuery(const Eigen::Ref<const nn::MatrixF>& features) = 0;

 private:
  std::atomic<size_t> queries_{0};
};

// Serves posteriors of a model it owns; the parameters are not reachable
// through the oracle interface.
class ModelOracle : public TeacherOracle {
 public:
  ModelOracle(nn::MlpModel model, std::string tag)
      : model_(std::move(model)), tag_(std::move(tag)) {}

  int num_classes() const override { return model_.num_classes(); }
  std::string tag() const override { return tag_; }

 protected:
  nn::MatrixD DoQuery(const Eigen::Ref<const nn::MatrixF>& features) override {
    return nn::Posteriors(model_, features);
  }

 private:
  nn::MlpModel model_;
  std::string tag_;
};

// Oracle backed by an arbitrary function; used for sealed/uniform teachers.
class FunctionOracle : public TeacherOracle {
 public:
  using Fn = std::function<nn::MatrixD(const Eigen::Ref<const nn::MatrixF>&)>;
  FunctionOracle(Fn fn, int num_classes, std::string tag)
      : fn_(std::move(fn)), classes_(num_classes), tag_(std::move(tag)) {}

  int num_classes() const override { return classes_; }
  std::string tag() const override { return tag_; }

 protected:
  nn::MatrixD DoQuery(const Eigen::Ref<const nn::MatrixF>& features) override {
    return fn_(features);
  }

 private:
  Fn fn_;
  int classes_;
  std::string tag_;
};

// Per-epoch student parameters of one distillation run (epochs 1..N).
struct SnapshotSeries {
  std::vector<nn::Snapshot> snapshots;
  std::string teacher_tag;
  std::string config_digest;
  uint64_t seed = 0;

  int length() const { return static_cast<int>(snapshots.size()); }
  const nn::MlpModel& at_epoch(int epoch) const {
    return snapshots.at(epoch - 1).model;
  }
};

// Throws kCorrupt unless N >= 1, epochs run 1..N in order and all
// snapshots share one architecture.
void ValidateSeries(const SnapshotSeries& series);

// One query per sample of d_k; each returned row must be a probability
// vector. Oracle failures are re-raised with the failing sample id.
nn::MatrixD CacheTeacherPosteriors(TeacherOracle& oracle,
                                   const data::FeatureDataset& d_k);

struct DistillResult {
  SnapshotSeries series;
  nn::MlpModel student;
  // Mean KL(teacher || student) over d_k after every epoch.
  std::vector<double> epoch_kl;
};

// Trains `student` on d_k against cached teacher posteriors with the pure
// KL objective (no ground-truth term, temperature 1), snapshotting after
// every epoch. cfg.snapshot_every must be 1.
DistillResult DistillFromTable(nn::MlpModel student,
                               const data::FeatureDataset& d_k,
                               const nn::MatrixD& teacher_posteriors,
                               const nn::TrainConfig& cfg,
                               const std::string& teacher_tag);

// Queries the oracle once per d_k sample, then distills into a freshly
// initialized student with the given architecture.
DistillResult Distill(TeacherOracle& oracle,
                      const std::vector<int>& student_dims,
                      nn::Activation activation,
                      const data::FeatureDataset& d_k,
                      const nn::TrainConfig& cfg);

// Same, starting from a caller-provided student.
DistillResult Distill(TeacherOracle& oracle, nn::MlpModel student,
                      const data::FeatureDataset& d_k,
                      const nn::TrainConfig& cfg);

double MeanKl(const nn::MatrixD& teacher_posteriors,
              const nn::MlpModel& student, const nn::MatrixF& features);

// Fraction of rows on which both models predict the same class.
double Agreement(const nn::MlpModel& a, const nn::MlpModel& b,
                 const data::FeatureDataset& data);

// {dir}/meta.json plus snap_0001.bin ... snap_{N}.bin.
void SaveSeries(const SnapshotSeries& series, const std::filesystem::path& dir);
SnapshotSeries LoadSeries(const std::filesystem::path& dir);

}  // namespace trajmia::distill

#endif  // TRAJMIA_DISTILL_DISTILL_H_
