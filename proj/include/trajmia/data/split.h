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

#ifndef TRAJMIA_DATA_SPLIT_H_
#define TRAJMIA_DATA_SPLIT_H_

#include <cstdint>
#include <optional>

#include "trajmia/data/dataset.h"

namespace trajmia::data {

// Sizes of the target/shadow train/test parts; whatever is left becomes
// the distillation set, optionally capped.
struct SplitSpec {
  size_t target_train = 0;
  size_t target_test = 0;
  size_t shadow_train = 0;
  size_t shadow_test = 0;
  std::optional<size_t> distill_cap;
  bool stratified = false;
  uint64_t seed = 0;

  bool operator==(const SplitSpec&) const = default;
};

struct DataSplit {
  FeatureDataset target_train;
  FeatureDataset target_test;
  FeatureDataset shadow_train;
  FeatureDataset shadow_test;
  FeatureDataset distill;
};

// Throws kInvalidArgument when any size is 0 or the four sizes exceed n.
void ValidateSplit(const SplitSpec& spec, size_t n);

// Seeded shuffle, then contiguous assignment in the order target_train,
// target_test, shadow_train, shadow_test, distill. In stratified mode each
// class is shuffled separately and dealt out so that every part receives
// per-class counts within one sample of proportional.
DataSplit Split(const FeatureDataset& data, const SplitSpec& spec);

}  // namespace trajmia::data

#endif  // TRAJMIA_DATA_SPLIT_H_
