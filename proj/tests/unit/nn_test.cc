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
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "trajmia/data/dataset.h"
#include "trajmia/error.h"
#include "trajmia/nn/backward.h"
#include "trajmia/nn/losses.h"
#include "trajmia/nn/mlp.h"
#include "trajmia/nn/serialize.h"
#include "trajmia/nn/train.h"
#include "trajmia/rng.h"
#include "test_util.h"

namespace trajmia::nn {
namespace {

using LongMatrix = Matrix<long double>;

// Straight loop forward pass, kept apart from the Eigen implementation.
std::vector<long double> NaiveLogits(const BasicMlp<long double>& model,
                                     const std::vector<long double>& x) {
  std::vector<long double> current = x;
  for (int l = 0; l < model.num_layers(); ++l) {
    std::vector<long double> next(model.layer_dims[l + 1]);
    for (int o = 0; o < model.layer_dims[l + 1]; ++o) {
      long double sum = model.biases[l](o);
      for (int i = 0; i < model.layer_dims[l]; ++i) {
        sum += model.weights[l](o, i) * current[i];
      }
      if (l + 1 < model.num_layers()) {
        sum = model.activation == Activation::kRelu ? std::max(sum, 0.0L)
                                                    : std::tanh(sum);
      }
      next[o] = sum;
    }
    current = std::move(next);
  }
  return current;
}

std::vector<long double> NaiveSoftmax(std::vector<long double> z) {
  const long double m = *std::max_element(z.begin(), z.end());
  long double total = 0;
  for (auto& v : z) total += (v = std::exp(v - m));
  for (auto& v : z) v /= total;
  return z;
}

// Mean batch loss, cross-entropy when teacher is empty, KL otherwise.
long double NaiveLoss(const BasicMlp<long double>& model, const MatrixD& x,
                      const std::vector<int>& labels, const MatrixD* teacher) {
  long double total = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<long double> row(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[c] = x(r, c);
    const std::vector<long double> p = NaiveSoftmax(NaiveLogits(model, row));
    if (teacher == nullptr) {
      total -= std::log(p[labels[r]]);
    } else {
      for (size_t k = 0; k < p.size(); ++k) {
        const long double t = (*teacher)(r, k);
        if (t > 0) total += t * std::log(t / p[k]);
      }
    }
  }
  return total / static_cast<long double>(x.rows());
}

struct GradCase {
  std::vector<int> dims;
  Activation activation;
  bool kl;
  int batch;
};

class GradientCheck : public ::testing::TestWithParam<int> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const int index = GetParam();
  Rng rng(1000 + index);
  GradCase gc;
  const int depth = 1 + static_cast<int>(rng.Below(3));
  gc.dims.push_back(2 + static_cast<int>(rng.Below(6)));
  for (int i = 0; i < depth; ++i) gc.dims.push_back(2 + static_cast<int>(rng.Below(7)));
  gc.dims.push_back(2 + static_cast<int>(rng.Below(4)));
  gc.activation = index % 2 == 0 ? Activation::kTanh : Activation::kRelu;
  gc.kl = index % 3 == 0;
  gc.batch = 1 + static_cast<int>(rng.Below(6));

  BasicMlp<double> model = MakeMlp(gc.dims, gc.activation, 77 + index).Cast<double>();
  for (auto& b : model.biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.Uniform(-0.5, 0.5);
  }
  MatrixD x(gc.batch, gc.dims.front());
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Normal();
  std::vector<int> labels(gc.batch);
  for (int& l : labels) l = static_cast<int>(rng.Below(gc.dims.back()));
  MatrixD teacher(gc.batch, gc.dims.back());
  for (Eigen::Index r = 0; r < teacher.rows(); ++r) {
    double total = 0;
    for (Eigen::Index c = 0; c < teacher.cols(); ++c) {
      total += teacher(r, c) = rng.Uniform(0.05, 1.0);
    }
    teacher.row(r) /= total;
  }

  const LossTarget<double> target =
      gc.kl ? LossTarget<double>::Kl(teacher) : LossTarget<double>::CrossEntropy(labels);
  Gradients<double> grads;
  const double loss = Backward<double>(model, x, target, &grads);

  BasicMlp<long double> wide = model.Cast<long double>();
  const MatrixD* teacher_ptr = gc.kl ? &teacher : nullptr;
  EXPECT_NEAR(loss, static_cast<double>(NaiveLoss(wide, x, labels, teacher_ptr)), 1e-9);

  const long double h = 1e-6L;
  long double diff_sq = 0, ref_sq = 0;
  auto probe = [&](long double& param, double analytic) {
    const long double saved = param;
    param = saved + h;
    const long double up = NaiveLoss(wide, x, labels, teacher_ptr);
    param = saved - h;
    const long double down = NaiveLoss(wide, x, labels, teacher_ptr);
    param = saved;
    const long double fd = (up - down) / (2 * h);
    diff_sq += (analytic - fd) * (analytic - fd);
    ref_sq += fd * fd;
  };
  for (int l = 0; l < wide.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < wide.weights[l].size(); ++i) {
      probe(wide.weights[l].data()[i], grads.weights[l].data()[i]);
    }
    for (Eigen::Index i = 0; i < wide.biases[l].size(); ++i) {
      probe(wide.biases[l].data()[i], grads.biases[l].data()[i]);
    }
  }
  const double rel = static_cast<double>(std::sqrt(diff_sq) / std::max(std::sqrt(ref_sq), 1e-12L));
  EXPECT_LE(rel, 1e-4) << "case " << index;
}

INSTANTIATE_TEST_SUITE_P(RandomCases, GradientCheck, ::testing::Range(0, 12));

TEST(Losses, SoftmaxRowsSumToOneAndKlIsNonNegative) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.Below(20));
    std::vector<double> a(k), b(k);
    const double scale = rng.Uniform(0.1, 40.0);
    for (int i = 0; i < k; ++i) {
      a[i] = scale * rng.Normal();
      b[i] = scale * rng.Normal();
    }
    const std::vector<double> p = SoftmaxTempered(a);
    const std::vector<double> q = SoftmaxTempered(b);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-6);
    EXPECT_GE(KlDiv(p, q), -1e-9);
    EXPECT_LE(KlDiv(p, p), 1e-9);
  }
}

TEST(Losses, SoftmaxIsShiftInvariantAndTempered) {
  const std::vector<double> z = {1.0, -2.0, 0.5};
  const std::vector<double> shifted = {1001.0, 998.0, 1000.5};
  const auto p = SoftmaxTempered(z);
  const auto q = SoftmaxTempered(shifted);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
  const auto hot = SoftmaxTempered(z, 1e-3);
  EXPECT_NEAR(hot[0], 1.0, 1e-12);
  const auto flat = SoftmaxTempered(z, 1e6);
  for (double v : flat) EXPECT_NEAR(v, 1.0 / 3, 1e-5);
  EXPECT_THROW(SoftmaxTempered(z, 0.0), Error);
}

TEST(Losses, CrossEntropyUsesFloor) {
  const std::vector<double> p = {1.0, 0.0};
  EXPECT_NEAR(CrossEntropy(0, p), -std::log(1.0 + kLogFloor), 1e-15);
  EXPECT_NEAR(CrossEntropy(1, p), -std::log(kLogFloor), 1e-9);
  EXPECT_THROW(CrossEntropy(2, p), Error);
  EXPECT_THROW(CrossEntropy(-1, p), Error);
}

TEST(Mlp, ForwardMatchesNaiveLoops) {
  const MlpModel model = MakeMlp({5, 7, 4, 3}, Activation::kRelu, 9);
  Rng rng(2);
  MatrixF x(6, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(rng.Normal());
  const MatrixF logits = Forward<float>(model, x);
  const BasicMlp<long double> wide = model.Cast<long double>();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<long double> row(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[c] = x(r, c);
    const auto expected = NaiveLogits(wide, row);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(logits(r, k), static_cast<double>(expected[k]), 1e-5);
  }
  EXPECT_THROW(Forward<float>(model, MatrixF(2, 4)), Error);
}

TEST(Mlp, ZeroModelIsUniform) {
  const MlpModel model = MakeZeroMlp({4, 3, 5});
  const MatrixD post = Posteriors(model, MatrixF::Ones(2, 4));
  for (Eigen::Index i = 0; i < post.size(); ++i) EXPECT_DOUBLE_EQ(post.data()[i], 0.2);
  EXPECT_EQ(Predict(model, MatrixF::Ones(1, 4))[0], 0);
}

TEST(Mlp, InitIsSeededAndBounded) {
  const MlpModel a = MakeMlp({10, 8, 2}, Activation::kTanh, 3);
  const MlpModel b = MakeMlp({10, 8, 2}, Activation::kTanh, 3);
  const MlpModel c = MakeMlp({10, 8, 2}, Activation::kTanh, 4);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  EXPECT_LE(a.weights[0].cwiseAbs().maxCoeff(), std::sqrt(6.0f / 10));
  EXPECT_EQ(a.ParameterCount(), 10u * 8 + 8 + 8 * 2 + 2);
}

TEST(Serialize, RoundTripIsExact) {
  const MlpModel model = MakeMlp({6, 5, 4, 3}, Activation::kTanh, 11);
  const std::vector<uint8_t> bytes = EncodeModel(model);
  EXPECT_EQ(DecodeModel(bytes), model);
  testing::TempDir dir;
  SaveModel(model, dir / "m.bin");
  EXPECT_EQ(LoadModel(dir / "m.bin"), model);
  EXPECT_EQ(SnapshotFileName(7), "snap_0007.bin");
}

TEST(Serialize, RejectsDamagedBytes) {
  std::vector<uint8_t> bytes = EncodeModel(MakeMlp({3, 2}, Activation::kRelu, 1));
  std::vector<uint8_t> truncated(bytes.begin(), bytes.end() - 1);
  try {
    DecodeModel(truncated);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorrupt);
  }
  bytes[0] = 'X';
  EXPECT_THROW(DecodeModel(bytes), Error);
  bytes = EncodeModel(MakeMlp({3, 2}, Activation::kRelu, 1));
  bytes.push_back(0);
  EXPECT_THROW(DecodeModel(bytes), Error);
  testing::TempDir dir;
  try {
    LoadModel(dir / "absent.bin");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingArtifact);
  }
}

data::FeatureDataset Blobs(int per_class, uint64_t seed) {
  Rng rng(seed);
  data::FeatureDataset d;
  d.class_count = 2;
  d.features.resize(2 * per_class, 2);
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i % 2;
    const float center = label == 0 ? -2.0f : 2.0f;
    d.features(i, 0) = center + static_cast<float>(0.3 * rng.Normal());
    d.features(i, 1) = static_cast<float>(0.3 * rng.Normal());
    d.labels.push_back(label);
    d.ids.push_back(i);
  }
  return d;
}

TEST(Train, FitsSeparableBlobs) {
  const data::FeatureDataset d = Blobs(100, 1);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.05;
  cfg.seed = 3;
  const TrainResult r = Train(MakeMlp({2, 8, 2}, Activation::kRelu, 4), d, cfg);
  EXPECT_GE(Accuracy(r.model, d), 0.99);
  ASSERT_EQ(r.epoch_loss.size(), 50u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST(Train, SameSeedSameModelAndSnapshots) {
  const data::FeatureDataset d = Blobs(40, 2);
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 7;
  cfg.seed = 10;
  cfg.snapshot_every = 2;
  const MlpModel init = MakeMlp({2, 6, 2}, Activation::kTanh, 1);
  const TrainResult a = Train(init, d, cfg);
  const TrainResult b = Train(init, d, cfg);
  EXPECT_EQ(a.model, b.model);
  ASSERT_EQ(a.snapshots.size(), 3u);
  EXPECT_EQ(a.snapshots[2].epoch, 6);
  EXPECT_EQ(a.snapshots[2].model, a.model);
  cfg.seed = 11;
  EXPECT_FALSE(Train(init, d, cfg).model == a.model);
}

TEST(Train, CosineScheduleEndpoints) {
  TrainConfig cfg;
  cfg.learning_rate = 0.4;
  EXPECT_DOUBLE_EQ(LearningRateAt(cfg, 0.0), 0.4);
  EXPECT_NEAR(LearningRateAt(cfg, 0.5), 0.2, 1e-15);
  EXPECT_NEAR(LearningRateAt(cfg, 1.0), 0.0, 1e-15);
  cfg.schedule = Schedule::kConstant;
  EXPECT_DOUBLE_EQ(LearningRateAt(cfg, 0.7), 0.4);
}

TEST(Train, RejectsBadConfigs) {
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(ValidateTrainConfig(cfg), Error);
  cfg = {};
  cfg.learning_rate = -1;
  EXPECT_THROW(ValidateTrainConfig(cfg), Error);
  DpConfig dp;
  dp.clip_bound = 0;
  EXPECT_THROW(ValidateDpConfig(dp), Error);
}

TEST(Train, DivergenceIsReportedAsNumerical) {
  const data::FeatureDataset d = Blobs(20, 3);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.learning_rate = 1e30;
  cfg.schedule = Schedule::kConstant;
  try {
    Train(MakeMlp({2, 4, 2}, Activation::kRelu, 1), d, cfg);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
}

TEST(DpSgd, ClippedNormsRespectBound) {
  const data::FeatureDataset d = Blobs(10, 4);
  const MlpModel model = MakeMlp({2, 5, 2}, Activation::kRelu, 2);
  DpConfig dp{.clip_bound = 0.05, .noise_multiplier = 0.0};
  Rng rng(1);
  Gradients<float> grads;
  std::vector<double> norms;
  DpBatchGradient(model, d.features, LossTarget<float>::CrossEntropy(d.labels), dp,
                  rng, &grads, &norms);
  ASSERT_EQ(norms.size(), d.size());
  for (double n : norms) EXPECT_LE(n, 0.05 * (1 + 1e-5));
  EXPECT_LE(std::sqrt(grads.SquaredNorm()), 0.05 * (1 + 1e-5));
}

TEST(DpSgd, ZeroNoiseHugeClipMatchesPlainSgdPerStep) {
  const data::FeatureDataset d = Blobs(32, 5);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  MlpModel plain = MakeMlp({2, 6, 2}, Activation::kTanh, 8);
  MlpModel dp_model = plain;
  Optimizer plain_opt(plain, cfg);
  Optimizer dp_opt(dp_model, cfg);
  const DpConfig dp{.clip_bound = 1e9, .noise_multiplier = 0.0};
  Rng rng(0);
  for (int step = 0; step < 25; ++step) {
    const Eigen::Index start = (step * 8) % 64;
    const MatrixF batch = d.features.middleRows(start, 8);
    const std::span<const int> labels(d.labels.data() + start, 8);
    Gradients<float> g1, g2;
    Backward<float>(plain, batch, LossTarget<float>::CrossEntropy(labels), &g1);
    DpBatchGradient(dp_model, batch, LossTarget<float>::CrossEntropy(labels), dp, rng, &g2);
    plain_opt.Step(plain, g1, cfg.learning_rate);
    dp_opt.Step(dp_model, g2, cfg.learning_rate);
    for (int l = 0; l < plain.num_layers(); ++l) {
      EXPECT_LE((plain.weights[l] - dp_model.weights[l]).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LE((plain.biases[l] - dp_model.biases[l]).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(DpSgd, NoiseChangesTheModel) {
  const data::FeatureDataset d = Blobs(30, 6);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 10;
  cfg.seed = 2;
  const MlpModel init = MakeMlp({2, 4, 2}, Activation::kRelu, 1);
  const TrainResult quiet = TrainDpSgd(init, d, cfg, {.clip_bound = 1e9, .noise_multiplier = 0});
  const TrainResult noisy = TrainDpSgd(init, d, cfg, {.clip_bound = 1.0, .noise_multiplier = 1.0});
  const TrainResult plain = Train(init, d, cfg);
  for (int l = 0; l < plain.model.num_layers(); ++l) {
    EXPECT_LE((plain.model.weights[l] - quiet.model.weights[l]).cwiseAbs().maxCoeff(), 1e-5);
  }
  EXPECT_FALSE(noisy.model == quiet.model);
  EXPECT_EQ(TrainDpSgd(init, d, cfg, {.clip_bound = 1.0, .noise_multiplier = 1.0}).model,
            noisy.model);
}

}  // namespace
}  // namespace trajmia::nn
