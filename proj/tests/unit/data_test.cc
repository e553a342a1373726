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

#include <algorithm>
#include <fstream>
#include <set>

#include "gtest/gtest.h"
#include "trajmia/data/dataset.h"
#include "trajmia/data/split.h"
#include "trajmia/error.h"
#include "trajmia/rng.h"
#include "test_util.h"

namespace trajmia::data {
namespace {

SynthSpec SmallSpec(uint64_t seed) {
  SynthSpec spec;
  spec.class_count = 4;
  spec.dim = 9;
  spec.per_class = 25;
  spec.seed = seed;
  return spec;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInternal;
}

TEST(Synth, DeterministicBalancedAndValid) {
  const FeatureDataset a = SynthGenerate(SmallSpec(1));
  EXPECT_EQ(a, SynthGenerate(SmallSpec(1)));
  EXPECT_FALSE(a == SynthGenerate(SmallSpec(2)));
  EXPECT_EQ(a.size(), 100u);
  EXPECT_EQ(a.dim(), 9);
  EXPECT_EQ(a.class_count, 4);
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(std::count(a.labels.begin(), a.labels.end(), c), 25);
  }
  EXPECT_NO_THROW(Validate(a));
}

TEST(Synth, ZeroSpreadSitsOnBinaryCenters) {
  SynthSpec spec = SmallSpec(3);
  spec.cluster_spread = 0.0;
  const FeatureDataset d = SynthGenerate(spec);
  for (Eigen::Index i = 0; i < d.features.size(); ++i) {
    const float v = d.features.data()[i];
    EXPECT_TRUE(v == 0.0f || v == 1.0f);
  }
  for (size_t i = 4; i < d.size(); ++i) {
    EXPECT_EQ(d.features.row(static_cast<Eigen::Index>(i)),
              d.features.row(static_cast<Eigen::Index>(i % 4)));
  }
}

TEST(Synth, ModesAndNoiseKnobs) {
  SynthSpec spec = SmallSpec(4);
  spec.modes_per_class = 5;
  spec.mode_spread = 2.0;
  spec.label_noise = 0.5;
  spec.spread_jitter = 3.0;
  const FeatureDataset d = SynthGenerate(spec);
  EXPECT_NO_THROW(Validate(d));
  EXPECT_EQ(d, SynthGenerate(spec));
  spec.modes_per_class = 0;
  EXPECT_EQ(CodeOf([&] { SynthGenerate(spec); }), ErrorCode::kInvalidArgument);
  spec = SmallSpec(4);
  spec.spread_jitter = 0.5;
  EXPECT_EQ(CodeOf([&] { SynthGenerate(spec); }), ErrorCode::kInvalidArgument);
}

TEST(Dataset, ValidateRejectsBadRows) {
  FeatureDataset d = SynthGenerate(SmallSpec(5));
  FeatureDataset bad = d;
  bad.features(3, 2) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(Validate(bad), Error);
  bad = d;
  bad.labels[0] = 7;
  EXPECT_THROW(Validate(bad), Error);
  bad = d;
  bad.ids[1] = bad.ids[0];
  EXPECT_THROW(Validate(bad), Error);
}

TEST(Dataset, CsvAndBinaryRoundTrip) {
  const FeatureDataset d = SynthGenerate(SmallSpec(6));
  testing::TempDir dir;
  SaveCsv(d, dir / "d.csv");
  EXPECT_EQ(LoadCsv(dir / "d.csv"), d);
  FeatureDataset shuffled = d.Subset(std::vector<size_t>{5, 2, 9});
  SaveBinary(shuffled, dir / "d.bin");
  const FeatureDataset back = LoadBinary(dir / "d.bin");
  EXPECT_EQ(back, shuffled);
  EXPECT_EQ(back.ids, (std::vector<uint64_t>{5, 2, 9}));
}

TEST(Dataset, CsvErrors) {
  testing::TempDir dir;
  EXPECT_EQ(CodeOf([&] { LoadCsv(dir / "absent.csv"); }), ErrorCode::kMissingArtifact);
  {
    std::ofstream f(dir / "ragged.csv");
    f << "a,b,label\n1,2,0\n3,1\n";
  }
  EXPECT_EQ(CodeOf([&] { LoadCsv(dir / "ragged.csv"); }), ErrorCode::kParse);
  {
    std::ofstream f(dir / "text.csv");
    f << "a,label\nx,0\n";
  }
  EXPECT_EQ(CodeOf([&] { LoadCsv(dir / "text.csv"); }), ErrorCode::kParse);
  {
    std::ofstream f(dir / "named.csv");
    f << "y,a\n1,0.5\n0,0.25\n";
  }
  const FeatureDataset named = LoadCsv(dir / "named.csv", "y");
  EXPECT_EQ(named.labels, (std::vector<int>{1, 0}));
  EXPECT_EQ(named.dim(), 1);
  EXPECT_EQ(CodeOf([&] { LoadCsv(dir / "named.csv", "missing"); }), ErrorCode::kParse);
}

TEST(Dataset, MinMaxScale) {
  FeatureDataset d = SynthGenerate(SmallSpec(7));
  d.features.col(0).setConstant(3.0f);
  MinMaxScale(d);
  EXPECT_EQ(d.features.col(0).cwiseAbs().maxCoeff(), 0.0f);
  for (Eigen::Index c = 1; c < d.features.cols(); ++c) {
    EXPECT_FLOAT_EQ(d.features.col(c).minCoeff(), 0.0f);
    EXPECT_FLOAT_EQ(d.features.col(c).maxCoeff(), 1.0f);
  }
}

std::set<uint64_t> Ids(const FeatureDataset& d) {
  return std::set<uint64_t>(d.ids.begin(), d.ids.end());
}

// Random split sizes: the five parts are disjoint, sized as requested and
// row-consistent with the source.
TEST(Split, PartsAreDisjointProperty) {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    SynthSpec spec = SmallSpec(trial);
    spec.class_count = 2 + static_cast<int>(rng.Below(5));
    spec.per_class = 10 + static_cast<int>(rng.Below(40));
    const FeatureDataset d = SynthGenerate(spec);
    const size_t n = d.size();
    SplitSpec s;
    s.target_train = 1 + rng.Below(n / 5);
    s.target_test = 1 + rng.Below(n / 5);
    s.shadow_train = 1 + rng.Below(n / 5);
    s.shadow_test = 1 + rng.Below(n / 5);
    if (rng.Below(2) == 0) s.distill_cap = 1 + rng.Below(n / 5);
    s.stratified = rng.Below(2) == 1;
    s.seed = trial;
    const DataSplit split = Split(d, s);
    const FeatureDataset* parts[] = {&split.target_train, &split.target_test,
                                     &split.shadow_train, &split.shadow_test,
                                     &split.distill};
    EXPECT_EQ(split.target_train.size(), s.target_train);
    EXPECT_EQ(split.target_test.size(), s.target_test);
    EXPECT_EQ(split.shadow_train.size(), s.shadow_train);
    EXPECT_EQ(split.shadow_test.size(), s.shadow_test);
    const size_t rest = n - s.target_train - s.target_test - s.shadow_train - s.shadow_test;
    EXPECT_EQ(split.distill.size(), s.distill_cap ? std::min(rest, *s.distill_cap) : rest);
    std::set<uint64_t> seen;
    size_t total = 0;
    for (const FeatureDataset* p : parts) {
      const auto ids = Ids(*p);
      EXPECT_EQ(ids.size(), p->size());
      total += ids.size();
      seen.insert(ids.begin(), ids.end());
      for (size_t i = 0; i < p->size(); ++i) {
        const auto src = static_cast<Eigen::Index>(p->ids[i]);
        EXPECT_EQ(p->labels[i], d.labels[src]);
        EXPECT_EQ(p->features.row(static_cast<Eigen::Index>(i)), d.features.row(src));
      }
    }
    EXPECT_EQ(seen.size(), total) << "parts overlap in trial " << trial;
  }
}

TEST(Split, DeterministicPerSeed) {
  const FeatureDataset d = SynthGenerate(SmallSpec(8));
  SplitSpec s{.target_train = 10, .target_test = 10, .shadow_train = 10,
              .shadow_test = 10, .distill_cap = std::nullopt, .stratified = false,
              .seed = 5};
  const DataSplit a = Split(d, s);
  EXPECT_EQ(a.target_train, Split(d, s).target_train);
  s.seed = 6;
  EXPECT_FALSE(a.target_train == Split(d, s).target_train);
}

TEST(Split, StratifiedCountsAreProportional) {
  const FeatureDataset d = SynthGenerate(SmallSpec(9));
  SplitSpec s{.target_train = 20, .target_test = 20, .shadow_train = 20,
              .shadow_test = 20, .distill_cap = std::nullopt, .stratified = true,
              .seed = 1};
  const DataSplit split = Split(d, s);
  for (const FeatureDataset* p : {&split.target_train, &split.shadow_test}) {
    for (int c = 0; c < 4; ++c) {
      const auto count = std::count(p->labels.begin(), p->labels.end(), c);
      EXPECT_NEAR(static_cast<double>(count), 5.0, 1.0);
    }
  }
}

TEST(Split, OversizedRequestIsRejected) {
  const FeatureDataset d = SynthGenerate(SmallSpec(10));
  SplitSpec s;
  s.target_train = s.target_test = s.shadow_train = s.shadow_test = 30;
  EXPECT_EQ(CodeOf([&] { Split(d, s); }), ErrorCode::kInvalidArgument);
  s.target_train = 0;
  s.target_test = s.shadow_train = s.shadow_test = 1;
  EXPECT_EQ(CodeOf([&] { Split(d, s); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace trajmia::data
