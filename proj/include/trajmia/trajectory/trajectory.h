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

#ifndef TRAJMIA_TRAJECTORY_TRAJECTORY_H_
#define TRAJMIA_TRAJECTORY_TRAJECTORY_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajmia/data/dataset.h"
#include "trajmia/distill/distill.h"

namespace trajmia::trajectory {

// Per-sample losses are clamped to [0, kLossClamp].
inline constexpr double kLossClamp = 30.0;

// losses = {loss under snapshot 1, ..., loss under snapshot N,
//           loss under the original model}.
struct TrajectoryRecord {
  uint64_t id = 0;
  std::vector<double> losses;
  std::optional<int> member;  // 1 member, 0 non-member, empty if unknown

  int distilled_length() const { return static_cast<int>(losses.size()) - 1; }
  double original_loss() const { return losses.back(); }

  bool operator==(const TrajectoryRecord&) const = default;
};

struct TrajectorySet {
  std::vector<TrajectoryRecord> records;
  int n = 0;  // distilled epochs; every record has n + 1 losses
  std::string provenance;

  size_t size() const { return records.size(); }
  bool operator==(const TrajectorySet&) const = default;
};

// Throws kCorrupt when a record's length differs from n + 1 or a loss is
// non-finite or negative.
void ValidateSet(const TrajectorySet& set);

// Cross-entropy of the true label for every row of `posteriors`, clamped.
std::vector<double> ClampedLosses(const nn::MatrixD& posteriors,
                                  std::span<const int> labels);

// Builds one record per sample: losses under every snapshot in epoch order,
// then the loss from original_posteriors (queried from the original model or
// oracle by the caller). Sample order is preserved.
TrajectorySet Extract(const distill::SnapshotSeries& series,
                      const nn::MatrixD& original_posteriors,
                      const data::FeatureDataset& samples,
                      std::optional<int> membership,
                      const std::string& provenance);

// Convenience overloads: the original as a white-box model, or as an
// oracle (one query per sample).
TrajectorySet Extract(const distill::SnapshotSeries& series,
                      const nn::MlpModel& original,
                      const data::FeatureDataset& samples,
                      std::optional<int> membership,
                      const std::string& provenance);
TrajectorySet Extract(const distill::SnapshotSeries& series,
                      distill::TeacherOracle& original,
                      const data::FeatureDataset& samples,
                      std::optional<int> membership,
                      const std::string& provenance);

// Smallest epoch e such that the argmax prediction is the same under every
// snapshot from e to N (a sample-hardness measure).
int HardnessStableEpoch(const distill::SnapshotSeries& series,
                        std::span<const float> sample);

// Column-wise standardization fitted on one set and applied to another.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Fit(const TrajectorySet& set);
  std::vector<double> Apply(std::span<const double> losses) const;

  bool operator==(const Standardizer&) const = default;
};

// Feature matrix built from selected loss positions of every record.
nn::MatrixF FeatureMatrix(const TrajectorySet& set,
                          std::span<const int> columns,
                          const Standardizer* standardizer = nullptr);

// CSV: "id,l_1,...,l_N,l_orig,member" with member 0/1/NA.
void SaveCsv(const TrajectorySet& set, const std::filesystem::path& path);
TrajectorySet LoadCsv(const std::filesystem::path& path);

}  // namespace trajmia::trajectory

#endif  // TRAJMIA_TRAJECTORY_TRAJECTORY_H_
