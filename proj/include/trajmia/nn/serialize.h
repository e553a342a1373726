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

#ifndef TRAJMIA_NN_SERIALIZE_H_
#define TRAJMIA_NN_SERIALIZE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trajmia/nn/mlp.h"

namespace trajmia::nn {

// Parameter file layout, all little-endian:
//   "TMIA" | u16 version | u8 activation | u8 dim count k |
//   k x u32 layer dims | per layer: f32 weights (row-major), f32 biases
inline constexpr uint16_t kModelFormatVersion = 1;

std::vector<uint8_t> EncodeModel(const MlpModel& model);
MlpModel DecodeModel(const std::vector<uint8_t>& bytes);

void SaveModel(const MlpModel& model, const std::filesystem::path& path);
MlpModel LoadModel(const std::filesystem::path& path);

// "snap_0007.bin"
std::string SnapshotFileName(int epoch);

}  // namespace trajmia::nn

#endif  // TRAJMIA_NN_SERIALIZE_H_
