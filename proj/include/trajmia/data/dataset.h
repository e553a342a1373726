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

#ifndef TRAJMIA_DATA_DATASET_H_
#define TRAJMIA_DATA_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trajmia/nn/mlp.h"

namespace trajmia::data {

// Dense feature rows with integer class labels and stable sample ids.
struct FeatureDataset {
  nn::MatrixF features;  // n x d, row-major
  std::vector<int> labels;
  int class_count = 0;
  std::vector<uint64_t> ids;

  size_t size() const { return labels.size(); }
  int dim() const { return static_cast<int>(features.cols()); }
  bool empty() const { return labels.empty(); }

  // Rows at the given positions, in that order.
  FeatureDataset Subset(std::span<const size_t> rows) const;

  bool operator==(const FeatureDataset& other) const = default;
};

// Throws kInvalidArgument on NaN/Inf features, labels outside
// [0, class_count), duplicate ids, or inconsistent sizes.
void Validate(const FeatureDataset& data);

// Header row "f0,...,f{d-1},label" by default; label_column names the label
// field. Class count is max label + 1. Ids are the 0-based row numbers.
FeatureDataset LoadCsv(const std::filesystem::path& path,
                       const std::string& label_column = "label");
void SaveCsv(const FeatureDataset& data, const std::filesystem::path& path);

// "TMDS" binary container; keeps ids.
void SaveBinary(const FeatureDataset& data, const std::filesystem::path& path);
FeatureDataset LoadBinary(const std::filesystem::path& path);

struct SynthSpec {
  int class_count = 10;
  int dim = 600;
  int per_class = 100;
  double cluster_spread = 0.5;
  // Probability that a center coordinate is 1 rather than 0.
  double center_density = 0.5;
  // Per-sample spread multiplier drawn log-uniformly from
  // [1/spread_jitter, spread_jitter]; 1 disables it.
  double spread_jitter = 1.0;
  // Fraction of samples whose label is resampled uniformly.
  double label_noise = 0.0;
  // Each class splits into this many sub-populations; a sample's mode is
  // drawn with weight 1/(m+1), so high modes are rare. The mode offset is
  // mode_spread * N(0, I).
  int modes_per_class = 1;
  double mode_spread = 0.0;
  uint64_t seed = 0;

  bool operator==(const SynthSpec&) const = default;
};

// Per class, a Gaussian cluster around a random binary center in
// {0,1}^dim. Balanced classes, rows interleaved by class, deterministic per
// seed.
FeatureDataset SynthGenerate(const SynthSpec& spec);

// Rescales every feature column to [0, 1]; constant columns become 0.
void MinMaxScale(FeatureDataset& data);

}  // namespace trajmia::data

#endif  // TRAJMIA_DATA_DATASET_H_
