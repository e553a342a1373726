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
#include <cmath>
#include <limits>
#include <set>

#include "gtest/gtest.h"
#include "trajmia/error.h"
#include "trajmia/metrics/export.h"
#include "trajmia/metrics/metrics.h"
#include "trajmia/rng.h"
#include "test_util.h"

namespace trajmia::metrics {
namespace {

struct Case {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Coarse integer-valued scores so that ties are common.
Case RandomCase(Rng& rng) {
  Case c;
  const size_t n = 2 + rng.Below(60);
  const double levels = 1 + static_cast<double>(rng.Below(12));
  for (size_t i = 0; i < n; ++i) {
    c.scores.push_back(std::floor(rng.Uniform() * levels));
    c.labels.push_back(static_cast<int>(rng.Below(2)));
  }
  c.labels[0] = 0;
  c.labels[1] = 1;
  return c;
}

double PairwiseAuc(const Case& c) {
  double wins = 0, pairs = 0;
  for (size_t i = 0; i < c.scores.size(); ++i) {
    if (c.labels[i] != 1) continue;
    for (size_t j = 0; j < c.scores.size(); ++j) {
      if (c.labels[j] != 0) continue;
      pairs += 1;
      if (c.scores[i] > c.scores[j]) wins += 1;
      if (c.scores[i] == c.scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Every threshold "score >= t" over the distinct scores plus +inf.
std::vector<RocPoint> BruteRates(const Case& c) {
  std::set<double> thresholds(c.scores.begin(), c.scores.end());
  thresholds.insert(std::numeric_limits<double>::infinity());
  const double pos = std::count(c.labels.begin(), c.labels.end(), 1);
  const double neg = static_cast<double>(c.labels.size()) - pos;
  std::vector<RocPoint> out;
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (size_t i = 0; i < c.scores.size(); ++i) {
      if (c.scores[i] >= t) (c.labels[i] == 1 ? tp : fp) += 1;
    }
    out.push_back({fp / neg, tp / pos});
  }
  return out;
}

TEST(Roc, AucEqualsPairwiseCount) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Case c = RandomCase(rng);
    EXPECT_NEAR(Auc(Roc(c.scores, c.labels)), PairwiseAuc(c), 1e-9) << trial;
  }
}

TEST(Roc, TprAtFprMatchesThresholdEnumeration) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Case c = RandomCase(rng);
    const auto roc = Roc(c.scores, c.labels);
    const auto brute = BruteRates(c);
    for (double target : {0.0, 0.001, 0.01, 0.1, 0.25, 0.5, 1.0}) {
      double best = 0;
      for (const RocPoint& p : brute) {
        if (p.fpr <= target) best = std::max(best, p.tpr);
      }
      EXPECT_EQ(TprAtFpr(roc, target), best) << trial << " @" << target;
    }
  }
}

TEST(Roc, InvariantUnderIncreasingTransforms) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Case c = RandomCase(rng);
    std::vector<double> shifted, cubed, logistic;
    for (double s : c.scores) {
      shifted.push_back(3.0 * s + 7.0);
      cubed.push_back(s * s * s);
      logistic.push_back(1.0 / (1.0 + std::exp(-s)));
    }
    const auto base = Roc(c.scores, c.labels);
    for (const auto& t : {shifted, cubed, logistic}) {
      const auto other = Roc(t, c.labels);
      ASSERT_EQ(other.size(), base.size());
      for (size_t i = 0; i < base.size(); ++i) {
        EXPECT_EQ(other[i].fpr, base[i].fpr);
        EXPECT_EQ(other[i].tpr, base[i].tpr);
      }
    }
  }
}

TEST(Roc, ShapeAndErrors) {
  const std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
  const std::vector<int> l = {1, 1, 0, 0};
  const auto roc = Roc(s, l);
  EXPECT_EQ(roc.front().fpr, 0.0);
  EXPECT_EQ(roc.front().tpr, 0.0);
  EXPECT_EQ(roc.back().fpr, 1.0);
  EXPECT_EQ(roc.back().tpr, 1.0);
  EXPECT_EQ(Auc(roc), 1.0);
  const std::vector<int> one_class = {1, 1, 1, 1};
  EXPECT_THROW(Roc(s, one_class), Error);
  const std::vector<int> bad = {1, 0, 2, 0};
  EXPECT_THROW(Roc(s, bad), Error);
  EXPECT_THROW(Roc(std::vector<double>{0.1}, l), Error);
}

TEST(BalancedAccuracy, MaximumMatchesBruteForce) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Case c = RandomCase(rng);
    const BalancedAccuracy b = MaxBalancedAccuracy(c.scores, c.labels);
    double best = -1, best_t = 0;
    std::set<double> ts(c.scores.begin(), c.scores.end());
    for (double t : ts) {
      const RocPoint r = RatesAt(c.scores, c.labels, t);
      const double v = (r.tpr + 1.0 - r.fpr) / 2;
      if (v > best + 1e-12) {
        best = v;
        best_t = t;
      }
    }
    EXPECT_NEAR(b.value, best, 1e-12) << trial;
    EXPECT_EQ(b.threshold, best_t) << trial;
    EXPECT_NEAR(BalancedAccuracyAt(c.scores, c.labels, b.threshold), b.value, 1e-12);
  }
}

TEST(LossBins, EdgesAreExact) {
  EXPECT_EQ(LossBinIndex(0.0), 0);
  EXPECT_EQ(LossBinIndex(std::nextafter(0.02, 0.0)), 0);
  EXPECT_EQ(LossBinIndex(0.02), 1);
  EXPECT_EQ(LossBinIndex(std::nextafter(0.2, 0.0)), 1);
  EXPECT_EQ(LossBinIndex(0.2), 2);
  EXPECT_EQ(LossBinIndex(1e6), 2);
}

TEST(LossBins, PlantedSamplesRouteToTheirBins) {
  // Members/non-members planted per bin; in "small" only members exist.
  const std::vector<double> losses = {0.001, 0.01, 0.05, 0.1, 0.15, 0.5, 3.0, 9.0};
  const std::vector<int> labels = {1, 1, 1, 0, 0, 1, 0, 0};
  const std::vector<double> scores = {0.9, 0.8, 0.7, 0.2, 0.6, 0.9, 0.1, 0.3};
  const auto bins = LossRangeReport(scores, labels, losses);
  ASSERT_EQ(bins.size(), 3u);
  EXPECT_EQ(bins[0].name, "small");
  EXPECT_EQ(bins[0].lower, 0.0);
  EXPECT_EQ(bins[0].upper, 0.02);
  EXPECT_EQ(bins[0].members, 2u);
  EXPECT_EQ(bins[0].nonmembers, 0u);
  EXPECT_FALSE(bins[0].tpr_at_low_fpr.has_value());
  EXPECT_EQ(bins[1].members, 1u);
  EXPECT_EQ(bins[1].nonmembers, 2u);
  EXPECT_EQ(bins[1].upper, 0.2);
  EXPECT_EQ(*bins[1].tpr_at_low_fpr, 1.0);
  EXPECT_EQ(bins[2].members, 1u);
  EXPECT_EQ(bins[2].nonmembers, 2u);
  EXPECT_TRUE(std::isinf(bins[2].upper));
}

EvalReport SampleReport(const std::string& method) {
  Rng rng(5);
  std::vector<uint64_t> ids;
  std::vector<double> scores, losses;
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) {
    ids.push_back(100 + i);
    labels.push_back(i % 2);
    scores.push_back(rng.Uniform() + 0.3 * labels.back());
    losses.push_back(rng.Uniform() * 0.5);
  }
  return Evaluate(method, ids, scores, labels, losses, 7, "digest");
}

TEST(Report, EvaluateFillsEveryField) {
  const EvalReport r = SampleReport("ours");
  EXPECT_EQ(r.ids.size(), 50u);
  EXPECT_NEAR(r.auc, Auc(r.roc), 0);
  ASSERT_EQ(r.tpr_at_fpr.size(), 3u);
  EXPECT_EQ(r.tpr_at_fpr[0].fpr, 0.001);
  EXPECT_EQ(r.tpr_at_fpr[2].tpr, TprAtFpr(r.roc, 0.1));
  EXPECT_EQ(r.loss_ranges.size(), 3u);
  EXPECT_EQ(r.balanced_accuracy, MaxBalancedAccuracy(r.scores, r.labels));
  EXPECT_TRUE(Evaluate("m", r.ids, r.scores, r.labels, {}, 1, "d").loss_ranges.empty());
}

TEST(Report, JsonRoundTripIsLossless) {
  RunReport run;
  run.seed = 3;
  run.config_digest = "abc";
  run.stats = {{"target_gap", 0.25}, {"distill_epochs", 30}};
  run.methods = {SampleReport("ours"), SampleReport("yeom_loss")};
  const std::string json = RunReportToJson(run);
  const RunReport back = RunReportFromJson(json);
  EXPECT_EQ(back, run);
  EXPECT_EQ(RunReportToJson(back), json);
  EXPECT_EQ(back.Stat("target_gap"), 0.25);
  EXPECT_THROW(back.Stat("nope"), Error);
  ASSERT_NE(back.Find("yeom_loss"), nullptr);
  EXPECT_EQ(back.Find("salem"), nullptr);
  EXPECT_THROW(RunReportFromJson("{"), Error);
}

TEST(Export, RocCsvSvgAndScores) {
  const EvalReport r = SampleReport("ours");
  const std::string csv = RocCsv(r.roc);
  EXPECT_EQ(csv.rfind("fpr,tpr\n", 0), 0u);
  EXPECT_EQ(static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n')), r.roc.size() + 1);
  const std::vector<EvalReport> reports = {r, SampleReport("yeom_loss")};
  const std::string svg = RocSvg(reports);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("yeom_loss"), std::string::npos);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 5, true);

  testing::TempDir dir;
  std::vector<int> labels = r.labels;
  labels[3] = -1;
  WriteScoresCsv(r.ids, r.scores, labels, dir / "s.csv");
  const ScoreTable t = ReadScoresCsv(dir / "s.csv");
  EXPECT_EQ(t.ids, r.ids);
  EXPECT_EQ(t.scores, r.scores);
  EXPECT_EQ(t.labels, labels);
}

}  // namespace
}  // namespace trajmia::metrics
