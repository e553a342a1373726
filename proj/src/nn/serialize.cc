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

#include "trajmia/nn/serialize.h"

#include <cstdio>

#include "trajmia/io.h"

namespace trajmia::nn {

std::vector<uint8_t> EncodeModel(const MlpModel& model) {
  ValidateModel(model);
  Require(model.layer_dims.size() <= 255, "too many layers to encode");
  io::ByteWriter out;
  out.Bytes("TMIA");
  out.Put<uint16_t>(kModelFormatVersion);
  out.Put<uint8_t>(static_cast<uint8_t>(model.activation));
  out.Put<uint8_t>(static_cast<uint8_t>(model.layer_dims.size()));
  for (int d : model.layer_dims) out.Put<uint32_t>(static_cast<uint32_t>(d));
  for (int i = 0; i < model.num_layers(); ++i) {
    out.PutArray(model.weights[i].data(), model.weights[i].size());
    out.PutArray(model.biases[i].data(), model.biases[i].size());
  }
  return out.Take();
}

MlpModel DecodeModel(const std::vector<uint8_t>& bytes) {
  io::ByteReader in(bytes, "model file");
  in.Expect("TMIA");
  const auto version = in.Get<uint16_t>();
  if (version != kModelFormatVersion) {
    Fail(ErrorCode::kCorrupt,
         "unsupported model format version " + std::to_string(version));
  }
  const auto activation = in.Get<uint8_t>();
  if (activation > 1) Fail(ErrorCode::kCorrupt, "unknown activation code");
  const auto dim_count = in.Get<uint8_t>();
  if (dim_count < 2) Fail(ErrorCode::kCorrupt, "model has fewer than 2 dims");
  std::vector<int> dims(dim_count);
  for (int& d : dims) {
    const auto value = in.Get<uint32_t>();
    if (value == 0 || value > (1u << 24)) {
      Fail(ErrorCode::kCorrupt, "implausible layer dim");
    }
    d = static_cast<int>(value);
  }
  MlpModel model = MakeZeroMlp(dims, static_cast<Activation>(activation));
  for (int i = 0; i < model.num_layers(); ++i) {
    in.GetArray(model.weights[i].data(), model.weights[i].size());
    in.GetArray(model.biases[i].data(), model.biases[i].size());
  }
  in.ExpectEnd();
  return model;
}

void SaveModel(const MlpModel& model, const std::filesystem::path& path) {
  io::WriteBytes(path, EncodeModel(model));
}

MlpModel LoadModel(const std::filesystem::path& path) {
  try {
    return DecodeModel(io::ReadBytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorrupt) {
      Fail(ErrorCode::kCorrupt, path.string() + ": " + e.what());
    }
    throw;
  }
}

std::string SnapshotFileName(int epoch) {
  char name[32];
  std::snprintf(name, sizeof(name), "snap_%04d.bin", epoch);
  return name;
}

}  // namespace trajmia::nn
