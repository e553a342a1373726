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

#include <cmath>

#include "gtest/gtest.h"
#include "trajmia/data/dataset.h"
#include "trajmia/distill/distill.h"
#include "trajmia/error.h"
#include "trajmia/nn/losses.h"
#include "trajmia/nn/serialize.h"
#include "trajmia/nn/train.h"
#include "test_util.h"

namespace trajmia::distill {
namespace {

data::FeatureDataset Data(uint64_t seed, int per_class = 60) {
  data::SynthSpec spec;
  spec.class_count = 3;
  spec.dim = 8;
  spec.per_class = per_class;
  spec.cluster_spread = 0.4;
  spec.seed = seed;
  return data::SynthGenerate(spec);
}

nn::TrainConfig DistillCfg(int epochs) {
  nn::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.1;
  cfg.seed = 4;
  cfg.snapshot_every = 1;
  return cfg;
}

nn::MlpModel Teacher() {
  nn::TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.seed = 1;
  return nn::Train(nn::MakeMlp({8, 16, 3}, nn::Activation::kRelu, 2), Data(1), cfg).model;
}

TEST(Distill, StudentApproachesTeacher) {
  ModelOracle oracle(Teacher(), "teacher");
  const data::FeatureDataset d_k = Data(2, 100);
  const DistillResult r =
      Distill(oracle, {8, 16, 3}, nn::Activation::kRelu, d_k, DistillCfg(15));
  EXPECT_EQ(oracle.query_count(), d_k.size());
  ASSERT_EQ(r.series.length(), 15);
  ASSERT_EQ(r.epoch_kl.size(), 15u);
  EXPECT_LT(r.epoch_kl.back(), r.epoch_kl.front());
  EXPECT_EQ(r.series.at_epoch(15), r.student);
  for (int e = 1; e <= 15; ++e) EXPECT_EQ(r.series.snapshots[e - 1].epoch, e);
  const nn::MatrixD teacher = nn::Posteriors(Teacher(), d_k.features);
  EXPECT_NEAR(MeanKl(teacher, r.student, d_k.features), r.epoch_kl.back(), 1e-12);
  EXPECT_GE(Agreement(Teacher(), r.student, d_k), 0.9);
}

TEST(Distill, MeanKlMatchesDirectSum) {
  const nn::MlpModel a = nn::MakeMlp({8, 5, 3}, nn::Activation::kTanh, 1);
  const nn::MlpModel b = nn::MakeMlp({8, 5, 3}, nn::Activation::kTanh, 2);
  const data::FeatureDataset d = Data(3, 10);
  const nn::MatrixD pa = nn::Posteriors(a, d.features);
  const nn::MatrixD pb = nn::Posteriors(b, d.features);
  double total = 0;
  for (Eigen::Index r = 0; r < pa.rows(); ++r) {
    for (Eigen::Index c = 0; c < pa.cols(); ++c) {
      total += pa(r, c) * std::log(pa(r, c) / pb(r, c));
    }
  }
  EXPECT_NEAR(MeanKl(pa, b, d.features), total / pa.rows(), 1e-9);
  EXPECT_NEAR(MeanKl(pa, a, d.features), 0.0, 1e-9);
}

TEST(Distill, UniformTeacherKeepsStudentNearUniform) {
  FunctionOracle uniform(
      [](const Eigen::Ref<const nn::MatrixF>& x) {
        return nn::MatrixD::Constant(x.rows(), 3, 1.0 / 3);
      },
      3, "uniform");
  const data::FeatureDataset d_k = Data(4, 40);
  const DistillResult r = Distill(uniform, nn::MakeZeroMlp({8, 4, 3}), d_k, DistillCfg(5));
  const nn::MatrixD post = nn::Posteriors(r.student, d_k.features);
  EXPECT_LE((post.array() - 1.0 / 3).abs().maxCoeff(), 1e-6);
}

TEST(Distill, DeterministicAndSeedSensitive) {
  const nn::MatrixD table = nn::Posteriors(Teacher(), Data(5).features);
  const data::FeatureDataset d_k = Data(5);
  const nn::MlpModel init = nn::MakeMlp({8, 6, 3}, nn::Activation::kRelu, 3);
  const DistillResult a = DistillFromTable(init, d_k, table, DistillCfg(3), "t");
  const DistillResult b = DistillFromTable(init, d_k, table, DistillCfg(3), "t");
  EXPECT_EQ(a.student, b.student);
  EXPECT_EQ(a.series.snapshots.size(), b.series.snapshots.size());
  nn::TrainConfig other = DistillCfg(3);
  other.seed = 99;
  EXPECT_FALSE(DistillFromTable(init, d_k, table, other, "t").student == a.student);
}

TEST(Distill, RejectsBadTeacherOutput) {
  FunctionOracle broken(
      [](const Eigen::Ref<const nn::MatrixF>& x) {
        return nn::MatrixD::Constant(x.rows(), 3, 0.5);
      },
      3, "broken");
  EXPECT_THROW(CacheTeacherPosteriors(broken, Data(6, 5)), Error);
  nn::TrainConfig cfg = DistillCfg(2);
  cfg.snapshot_every = 0;
  const data::FeatureDataset d_k = Data(6, 5);
  const nn::MatrixD table = nn::MatrixD::Constant(d_k.size(), 3, 1.0 / 3);
  EXPECT_THROW(DistillFromTable(nn::MakeZeroMlp({8, 3}), d_k, table, cfg, "t"), Error);
}

TEST(Series, SaveLoadRoundTripAndValidation) {
  const data::FeatureDataset d_k = Data(7, 20);
  const nn::MatrixD table = nn::MatrixD::Constant(d_k.size(), 3, 1.0 / 3);
  DistillResult r = DistillFromTable(nn::MakeMlp({8, 4, 3}, nn::Activation::kTanh, 1),
                                     d_k, table, DistillCfg(4), "teacher-x");
  r.series.config_digest = "abc";
  r.series.seed = 12;
  testing::TempDir dir;
  SaveSeries(r.series, dir / "series");
  const SnapshotSeries back = LoadSeries(dir / "series");
  ASSERT_EQ(back.length(), 4);
  EXPECT_EQ(back.teacher_tag, "teacher-x");
  EXPECT_EQ(back.config_digest, "abc");
  EXPECT_EQ(back.seed, 12u);
  for (int e = 1; e <= 4; ++e) EXPECT_EQ(back.at_epoch(e), r.series.at_epoch(e));

  SnapshotSeries gap = r.series;
  gap.snapshots[2].epoch = 7;
  EXPECT_THROW(ValidateSeries(gap), Error);
  EXPECT_THROW(ValidateSeries(SnapshotSeries{}), Error);
  std::filesystem::remove(dir / "series" / nn::SnapshotFileName(3));
  EXPECT_THROW(LoadSeries(dir / "series"), Error);
}

}  // namespace
}  // namespace trajmia::distill
