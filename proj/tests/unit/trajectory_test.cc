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
#include <fstream>

#include "gtest/gtest.h"
#include "trajmia/data/dataset.h"
#include "trajmia/distill/distill.h"
#include "trajmia/error.h"
#include "trajmia/nn/losses.h"
#include "trajmia/rng.h"
#include "trajmia/trajectory/trajectory.h"
#include "test_util.h"

namespace trajmia::trajectory {
namespace {

data::FeatureDataset Samples(int per_class) {
  data::SynthSpec spec;
  spec.class_count = 3;
  spec.dim = 5;
  spec.per_class = per_class;
  spec.seed = 21;
  return data::SynthGenerate(spec);
}

distill::SnapshotSeries Series(int n) {
  distill::SnapshotSeries s;
  for (int e = 1; e <= n; ++e) {
    s.snapshots.push_back({e, nn::MakeMlp({5, 4, 3}, nn::Activation::kTanh, 100 + e)});
  }
  s.teacher_tag = "t";
  return s;
}

double RecomputeLoss(const nn::MlpModel& model, const data::FeatureDataset& d, size_t i) {
  const nn::MatrixF row = d.features.row(static_cast<Eigen::Index>(i));
  const nn::MatrixD post = nn::Posteriors(model, row);
  const std::vector<double> p(post.data(), post.data() + post.size());
  return std::min(nn::CrossEntropy(d.labels[i], p), kLossClamp);
}

TEST(Extract, OrderingAndBitExactRecomputation) {
  const data::FeatureDataset d = Samples(40);
  const distill::SnapshotSeries series = Series(6);
  const nn::MlpModel original = nn::MakeMlp({5, 7, 3}, nn::Activation::kRelu, 3);
  const TrajectorySet set = Extract(series, original, d, 1, "test");
  ASSERT_EQ(set.size(), d.size());
  EXPECT_EQ(set.n, 6);
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t i = rng.Below(d.size());
    const TrajectoryRecord& r = set.records[i];
    ASSERT_EQ(r.losses.size(), 7u);
    EXPECT_EQ(r.id, d.ids[i]);
    EXPECT_EQ(r.member, 1);
    for (int e = 1; e <= 6; ++e) {
      EXPECT_EQ(r.losses[e - 1], RecomputeLoss(series.at_epoch(e), d, i));
    }
    EXPECT_EQ(r.original_loss(), RecomputeLoss(original, d, i));
  }
}

TEST(Extract, OracleAndTableAgreeWithWhiteBox) {
  const data::FeatureDataset d = Samples(10);
  const distill::SnapshotSeries series = Series(3);
  const nn::MlpModel original = nn::MakeMlp({5, 7, 3}, nn::Activation::kRelu, 5);
  distill::ModelOracle oracle(original, "o");
  const TrajectorySet a = Extract(series, original, d, std::nullopt, "p");
  const TrajectorySet b = Extract(series, oracle, d, std::nullopt, "p");
  const TrajectorySet c = Extract(series, nn::Posteriors(original, d.features), d, std::nullopt, "p");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(oracle.query_count(), d.size());
  EXPECT_FALSE(a.records[0].member.has_value());
}

TEST(Extract, LossesAreFloored) {
  nn::MatrixD post(2, 2);
  post << 1.0, 0.0, 0.5, 0.5;
  const std::vector<int> labels = {1, 0};
  const std::vector<double> losses = ClampedLosses(post, labels);
  EXPECT_NEAR(losses[0], -std::log(nn::kLogFloor), 1e-9);
  EXPECT_LE(losses[0], kLossClamp);
  EXPECT_NEAR(losses[1], std::log(2.0), 1e-11);
}

TEST(Extract, RejectsMismatchedInputs) {
  const data::FeatureDataset d = Samples(5);
  EXPECT_THROW(Extract(Series(2), nn::MatrixD::Constant(3, 3, 1.0 / 3), d, 0, "p"), Error);
  EXPECT_THROW(Extract(distill::SnapshotSeries{}, nn::MakeZeroMlp({5, 3}), d, 0, "p"), Error);
}

TEST(Hardness, StableEpochWalksBackFromTheEnd) {
  // Hand-built snapshots whose prediction for a fixed input is controlled by
  // the sign of a single bias.
  auto fixed = [](int predicted) {
    nn::MlpModel m = nn::MakeZeroMlp({2, 2});
    m.biases[0](predicted) = 1.0f;
    return m;
  };
  auto series_of = [&](std::vector<int> preds) {
    distill::SnapshotSeries s;
    for (size_t i = 0; i < preds.size(); ++i) {
      s.snapshots.push_back({static_cast<int>(i) + 1, fixed(preds[i])});
    }
    return s;
  };
  const std::vector<float> x = {0.3f, -0.2f};
  EXPECT_EQ(HardnessStableEpoch(series_of({0, 0, 0, 0}), x), 1);
  EXPECT_EQ(HardnessStableEpoch(series_of({1, 0, 1, 1}), x), 3);
  EXPECT_EQ(HardnessStableEpoch(series_of({0, 0, 0, 1}), x), 4);
  EXPECT_EQ(HardnessStableEpoch(series_of({1, 0, 0, 0}), x), 2);
}

TEST(Standardizer, FitsColumnsAndFloorsConstantOnes) {
  TrajectorySet set;
  set.n = 1;
  set.records = {{1, {1.0, 5.0}, 1}, {2, {3.0, 5.0}, 0}};
  const Standardizer s = Standardizer::Fit(set);
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.scale[0], 1.0);
  EXPECT_DOUBLE_EQ(s.scale[1], 1.0);
  const std::vector<double> z = s.Apply(std::vector<double>{3.0, 5.0});
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
  const std::vector<int> cols = {1, 0};
  const nn::MatrixF f = FeatureMatrix(set, cols, &s);
  EXPECT_EQ(f.rows(), 2);
  EXPECT_FLOAT_EQ(f(0, 1), -1.0f);
  EXPECT_FLOAT_EQ(f(0, 0), 0.0f);
}

TEST(Csv, RoundTripIncludingUnknownMembership) {
  TrajectorySet set;
  set.n = 2;
  set.provenance = "x";
  set.records = {{10, {0.1, 1e-12, 30.0}, 1},
                 {11, {2.0 / 3, 0.0, 1.5}, std::nullopt},
                 {12, {7.0, 3.25, 1e-5}, 0}};
  testing::TempDir dir;
  SaveCsv(set, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "id,l_1,l_2,l_orig,member");
  const TrajectorySet back = LoadCsv(dir / "t.csv");
  EXPECT_EQ(back.n, 2);
  EXPECT_EQ(back.records, set.records);
}

TEST(Csv, RejectsCorruptFiles) {
  testing::TempDir dir;
  {
    std::ofstream f(dir / "short.csv");
    f << "id,l_1,l_orig,member\n1,0.5,0\n";
  }
  EXPECT_THROW(LoadCsv(dir / "short.csv"), Error);
  {
    std::ofstream f(dir / "neg.csv");
    f << "id,l_1,l_orig,member\n1,-0.5,0.1,1\n";
  }
  EXPECT_THROW(LoadCsv(dir / "neg.csv"), Error);
  {
    std::ofstream f(dir / "member.csv");
    f << "id,l_1,l_orig,member\n1,0.5,0.1,2\n";
  }
  EXPECT_THROW(LoadCsv(dir / "member.csv"), Error);
}

}  // namespace
}  // namespace trajmia::trajectory
