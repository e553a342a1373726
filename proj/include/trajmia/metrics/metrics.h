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

#ifndef TRAJMIA_METRICS_METRICS_H_
#define TRAJMIA_METRICS_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trajmia::metrics {

// A sample is predicted "member" when its score is >= the threshold.
struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

// Sweeps thresholds over the unique scores in descending order. Equal scores
// cross the threshold together. Starts at (0,0) and ends at (1,1).
// Throws kInvalidArgument when only one class is present.
std::vector<RocPoint> Roc(std::span<const double> scores,
                          std::span<const int> labels);

// Largest tpr among points with fpr <= fpr_target.
double TprAtFpr(std::span<const RocPoint> roc, double fpr_target);

// Trapezoidal area under the curve.
double Auc(std::span<const RocPoint> roc);

struct BalancedAccuracy {
  double value = 0.0;
  double threshold = 0.0;
  bool operator==(const BalancedAccuracy&) const = default;
};

// Maximizes (TPR + TNR) / 2 over every unique score used as a threshold.
// Ties go to the lowest threshold.
BalancedAccuracy MaxBalancedAccuracy(std::span<const double> scores,
                                     std::span<const int> labels);

// Balanced accuracy at a fixed (e.g. shadow-calibrated) threshold.
double BalancedAccuracyAt(std::span<const double> scores,
                          std::span<const int> labels, double threshold);

// TPR and FPR at a fixed threshold.
RocPoint RatesAt(std::span<const double> scores, std::span<const int> labels,
                 double threshold);

inline constexpr double kLowFpr = 0.001;
inline constexpr double kReportFprs[] = {0.001, 0.01, 0.1};

struct LossBin {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;  // exclusive; +inf for the last bin
  size_t members = 0;
  size_t nonmembers = 0;
  std::optional<double> tpr_at_low_fpr;  // empty if a class is missing
  bool operator==(const LossBin&) const = default;
};

// Bin edges: small [0, 0.02), medium [0.02, 0.2), large [0.2, inf).
inline constexpr double kLossBinEdges[] = {0.0, 0.02, 0.2};
inline constexpr const char* kLossBinNames[] = {"small", "medium", "large"};

// Index of the bin holding `loss`.
int LossBinIndex(double loss);

std::vector<LossBin> LossRangeReport(std::span<const double> scores,
                                     std::span<const int> labels,
                                     std::span<const double> target_losses);

struct TprAt {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const TprAt&) const = default;
};

struct EvalReport {
  std::string method;
  std::vector<uint64_t> ids;
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<RocPoint> roc;
  double auc = 0.0;
  BalancedAccuracy balanced_accuracy;
  std::vector<TprAt> tpr_at_fpr;
  std::vector<LossBin> loss_ranges;
  uint64_t seed = 0;
  std::string config_digest;

  bool operator==(const EvalReport&) const = default;
};

// Builds a full report. target_losses may be empty, in which case no
// loss-range breakdown is produced.
EvalReport Evaluate(std::string method, std::vector<uint64_t> ids,
                    std::vector<double> scores, std::vector<int> labels,
                    std::span<const double> target_losses, uint64_t seed,
                    std::string config_digest);

}  // namespace trajmia::metrics

#endif  // TRAJMIA_METRICS_METRICS_H_
