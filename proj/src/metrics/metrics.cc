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

#include "trajmia/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trajmia/error.h"

namespace trajmia::metrics {
namespace {

struct ClassCounts {
  int64_t positives = 0;
  int64_t negatives = 0;
};

ClassCounts CheckInputs(std::span<const double> scores,
                        std::span<const int> labels) {
  Require(scores.size() == labels.size(), "scores and labels differ in length");
  ClassCounts counts;
  for (size_t i = 0; i < scores.size(); ++i) {
    Require(!std::isnan(scores[i]), "score is NaN");
    Require(labels[i] == 0 || labels[i] == 1, "labels must be 0 or 1");
    (labels[i] == 1 ? counts.positives : counts.negatives)++;
  }
  return counts;
}

// Indices ordered by descending score (stable, so equal scores keep input
// order; only the grouping matters downstream).
std::vector<size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Calls visit(threshold, tp, fp) once per unique score, highest first, with
// the counts of samples scoring >= threshold.
template <typename Visit>
void SweepThresholds(std::span<const double> scores,
                     std::span<const int> labels, Visit visit) {
  const std::vector<size_t> order = DescendingOrder(scores);
  int64_t tp = 0;
  int64_t fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    visit(threshold, tp, fp);
  }
}

}  // namespace

std::vector<RocPoint> Roc(std::span<const double> scores,
                          std::span<const int> labels) {
  const ClassCounts counts = CheckInputs(scores, labels);
  if (counts.positives == 0 || counts.negatives == 0) {
    Fail(ErrorCode::kInvalidArgument,
         "ROC is undefined unless both classes are present");
  }
  const auto p = static_cast<double>(counts.positives);
  const auto n = static_cast<double>(counts.negatives);
  std::vector<RocPoint> roc = {{0.0, 0.0}};
  SweepThresholds(scores, labels, [&](double, int64_t tp, int64_t fp) {
    roc.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
  });
  return roc;
}

double TprAtFpr(std::span<const RocPoint> roc, double fpr_target) {
  double best = 0.0;
  for (const RocPoint& point : roc) {
    if (point.fpr <= fpr_target) best = std::max(best, point.tpr);
  }
  return best;
}

double Auc(std::span<const RocPoint> roc) {
  double area = 0.0;
  for (size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
  }
  return area;
}

BalancedAccuracy MaxBalancedAccuracy(std::span<const double> scores,
                                     std::span<const int> labels) {
  const ClassCounts counts = CheckInputs(scores, labels);
  if (counts.positives == 0 || counts.negatives == 0) {
    Fail(ErrorCode::kInvalidArgument,
         "balanced accuracy needs both classes present");
  }
  const int64_t p = counts.positives;
  const int64_t n = counts.negatives;
  // 2PN * BA = tp * N + (N - fp) * P; compare the integer numerators.
  int64_t best_numerator = std::numeric_limits<int64_t>::min();
  BalancedAccuracy best;
  SweepThresholds(scores, labels, [&](double threshold, int64_t tp, int64_t fp) {
    const int64_t numerator = tp * n + (n - fp) * p;
    if (numerator >= best_numerator) {
      best_numerator = numerator;
      best.threshold = threshold;
    }
  });
  best.value = static_cast<double>(best_numerator) /
               (2.0 * static_cast<double>(p) * static_cast<double>(n));
  return best;
}

RocPoint RatesAt(std::span<const double> scores, std::span<const int> labels,
                 double threshold) {
  const ClassCounts counts = CheckInputs(scores, labels);
  int64_t tp = 0;
  int64_t fp = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= threshold) (labels[i] == 1 ? tp : fp)++;
  }
  RocPoint rates;
  if (counts.negatives > 0) {
    rates.fpr = static_cast<double>(fp) / static_cast<double>(counts.negatives);
  }
  if (counts.positives > 0) {
    rates.tpr = static_cast<double>(tp) / static_cast<double>(counts.positives);
  }
  return rates;
}

double BalancedAccuracyAt(std::span<const double> scores,
                          std::span<const int> labels, double threshold) {
  const ClassCounts counts = CheckInputs(scores, labels);
  if (counts.positives == 0 || counts.negatives == 0) {
    Fail(ErrorCode::kInvalidArgument,
         "balanced accuracy needs both classes present");
  }
  const RocPoint rates = RatesAt(scores, labels, threshold);
  return (rates.tpr + 1.0 - rates.fpr) / 2.0;
}

int LossBinIndex(double loss) {
  int bin = 0;
  for (int b = 1; b < static_cast<int>(std::size(kLossBinEdges)); ++b) {
    if (loss >= kLossBinEdges[b]) bin = b;
  }
  return bin;
}

std::vector<LossBin> LossRangeReport(std::span<const double> scores,
                                     std::span<const int> labels,
                                     std::span<const double> target_losses) {
  CheckInputs(scores, labels);
  Require(target_losses.size() == scores.size(),
          "target losses are not aligned with scores");
  constexpr int kBins = static_cast<int>(std::size(kLossBinEdges));
  std::vector<LossBin> bins(kBins);
  std::vector<std::vector<double>> bin_scores(kBins);
  std::vector<std::vector<int>> bin_labels(kBins);
  for (int b = 0; b < kBins; ++b) {
    bins[b].name = kLossBinNames[b];
    bins[b].lower = kLossBinEdges[b];
    bins[b].upper = b + 1 < kBins ? kLossBinEdges[b + 1]
                                  : std::numeric_limits<double>::infinity();
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    Require(target_losses[i] >= 0.0, "target loss must be non-negative");
    const int b = LossBinIndex(target_losses[i]);
    bin_scores[b].push_back(scores[i]);
    bin_labels[b].push_back(labels[i]);
    (labels[i] == 1 ? bins[b].members : bins[b].nonmembers)++;
  }
  for (int b = 0; b < kBins; ++b) {
    if (bins[b].members > 0 && bins[b].nonmembers > 0) {
      const std::vector<RocPoint> roc = Roc(bin_scores[b], bin_labels[b]);
      bins[b].tpr_at_low_fpr = TprAtFpr(roc, kLowFpr);
    }
  }
  return bins;
}

EvalReport Evaluate(std::string method, std::vector<uint64_t> ids,
                    std::vector<double> scores, std::vector<int> labels,
                    std::span<const double> target_losses, uint64_t seed,
                    std::string config_digest) {
  Require(ids.size() == scores.size(), "ids and scores differ in length");
  EvalReport report;
  report.method = std::move(method);
  report.roc = Roc(scores, labels);
  report.auc = Auc(report.roc);
  report.balanced_accuracy = MaxBalancedAccuracy(scores, labels);
  for (double fpr : kReportFprs) {
    report.tpr_at_fpr.push_back({fpr, TprAtFpr(report.roc, fpr)});
  }
  if (!target_losses.empty()) {
    report.loss_ranges = LossRangeReport(scores, labels, target_losses);
  }
  report.ids = std::move(ids);
  report.scores = std::move(scores);
  report.labels = std::move(labels);
  report.seed = seed;
  report.config_digest = std::move(config_digest);
  return report;
}

}  // namespace trajmia::metrics
