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

#include "trajmia/attack/attack.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trajmia/io.h"
#include "trajmia/nn/serialize.h"
#include "trajmia/rng.h"

namespace trajmia::attack {
namespace {

// Version 1 files predate the feature scale byte and are read as raw.
constexpr uint16_t kAttackFormatVersion = 2;

std::vector<size_t> Subsample(size_t n, size_t keep, Rng& rng) {
  std::vector<size_t> picked = rng.Permutation(n);
  picked.resize(keep);
  std::sort(picked.begin(), picked.end());
  return picked;
}

trajectory::TrajectorySet Rescaled(const trajectory::TrajectorySet& set,
                                   FeatureScale scale) {
  if (scale == FeatureScale::kRaw) return set;
  trajectory::TrajectorySet out = set;
  for (auto& r : out.records) {
    for (double& l : r.losses) l = std::log(l + kLogLossOffset);
  }
  return out;
}

}  // namespace

const char* FeatureScaleName(FeatureScale scale) {
  return scale == FeatureScale::kLog ? "log" : "raw";
}

FeatureScale ParseFeatureScale(std::string_view name) {
  if (name == "raw") return FeatureScale::kRaw;
  if (name == "log") return FeatureScale::kLog;
  Fail(ErrorCode::kInvalidArgument,
       "unknown feature scale '" + std::string(name) + "' (raw, log)");
}

std::vector<int> AllColumns(int n) {
  std::vector<int> columns(static_cast<size_t>(n) + 1);
  std::iota(columns.begin(), columns.end(), 0);
  return columns;
}

AttackModel TrainAttack(const trajectory::TrajectorySet& members,
                        const trajectory::TrajectorySet& nonmembers,
                        const AttackSpec& spec) {
  Require(!members.records.empty() && !nonmembers.records.empty(),
          "attack training needs members and non-members");
  if (members.n != nonmembers.n) {
    Fail(ErrorCode::kInvalidArgument,
         "member and non-member trajectories differ in N (" +
             std::to_string(members.n) + " vs " +
             std::to_string(nonmembers.n) + ")");
  }
  trajectory::ValidateSet(members);
  trajectory::ValidateSet(nonmembers);

  AttackModel attack;
  attack.trajectory_n = members.n;
  attack.columns = spec.columns.empty() ? AllColumns(members.n) : spec.columns;
  for (int c : attack.columns) {
    Require(c >= 0 && c <= members.n, "attack column out of range");
  }

  attack.scale = spec.scale;

  Rng rng(DeriveSeed(spec.train.seed, "balance"));
  const size_t keep = std::min(members.size(), nonmembers.size());
  trajectory::TrajectorySet train;
  train.n = members.n;
  for (size_t i : Subsample(members.size(), keep, rng)) {
    train.records.push_back(members.records[i]);
    train.records.back().member = 1;
  }
  for (size_t i : Subsample(nonmembers.size(), keep, rng)) {
    train.records.push_back(nonmembers.records[i]);
    train.records.back().member = 0;
  }
  train = Rescaled(train, attack.scale);
  if (spec.standardize) {
    attack.standardizer = trajectory::Standardizer::Fit(train);
  }
  const nn::MatrixF features = trajectory::FeatureMatrix(
      train, attack.columns,
      attack.standardizer ? &*attack.standardizer : nullptr);
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& r : train.records) labels.push_back(*r.member);

  std::vector<int> dims = {static_cast<int>(attack.columns.size())};
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(2);
  nn::MlpModel model = nn::MakeMlp(dims, nn::Activation::kRelu,
                                   DeriveSeed(spec.train.seed, "init"));
  attack.model = nn::TrainOnTargets(std::move(model), features,
                                    nn::LossTarget<float>::CrossEntropy(labels),
                                    spec.train)
                     .model;
  return attack;
}

std::vector<double> Score(const AttackModel& attack,
                          const trajectory::TrajectorySet& set) {
  if (set.n != attack.trajectory_n) {
    Fail(ErrorCode::kInvalidArgument,
         "trajectory N " + std::to_string(set.n) +
             " does not match the attack model's " +
             std::to_string(attack.trajectory_n));
  }
  trajectory::ValidateSet(set);
  const nn::MatrixF features = trajectory::FeatureMatrix(
      Rescaled(set, attack.scale), attack.columns,
      attack.standardizer ? &*attack.standardizer : nullptr);
  const nn::MatrixD post = nn::Posteriors(attack.model, features);
  std::vector<double> scores(set.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    scores[i] = post(static_cast<Eigen::Index>(i), 1);
  }
  return scores;
}

double Infer(const AttackModel& attack,
             const trajectory::TrajectoryRecord& record) {
  trajectory::TrajectorySet one;
  one.n = record.distilled_length();
  one.records.push_back(record);
  return Score(attack, one).front();
}

std::vector<uint8_t> EncodeAttack(const AttackModel& attack) {
  io::ByteWriter out;
  out.Bytes("TMAK");
  out.Put<uint16_t>(kAttackFormatVersion);
  out.Put<uint32_t>(static_cast<uint32_t>(attack.trajectory_n));
  out.Put<uint32_t>(static_cast<uint32_t>(attack.columns.size()));
  for (int c : attack.columns) out.Put<uint32_t>(static_cast<uint32_t>(c));
  out.Put<uint8_t>(static_cast<uint8_t>(attack.scale));
  out.Put<uint8_t>(attack.standardizer ? 1 : 0);
  if (attack.standardizer) {
    const auto& s = *attack.standardizer;
    out.Put<uint32_t>(static_cast<uint32_t>(s.mean.size()));
    out.PutArray(s.mean.data(), s.mean.size());
    out.PutArray(s.scale.data(), s.scale.size());
  }
  const std::vector<uint8_t> model = nn::EncodeModel(attack.model);
  out.PutArray(model.data(), model.size());
  return out.Take();
}

AttackModel DecodeAttack(const std::vector<uint8_t>& bytes) {
  io::ByteReader in(bytes, "attack model file");
  in.Expect("TMAK");
  const auto version = in.Get<uint16_t>();
  if (version == 0 || version > kAttackFormatVersion) {
    Fail(ErrorCode::kCorrupt, "unsupported attack model version");
  }
  AttackModel attack;
  attack.trajectory_n = static_cast<int>(in.Get<uint32_t>());
  const auto columns = in.Get<uint32_t>();
  if (columns == 0 || columns > static_cast<uint32_t>(attack.trajectory_n) + 1) {
    Fail(ErrorCode::kCorrupt, "attack model has a bad column count");
  }
  for (uint32_t i = 0; i < columns; ++i) {
    const auto c = in.Get<uint32_t>();
    if (c > static_cast<uint32_t>(attack.trajectory_n)) {
      Fail(ErrorCode::kCorrupt, "attack column out of range");
    }
    attack.columns.push_back(static_cast<int>(c));
  }
  if (version >= 2) {
    const auto scale = in.Get<uint8_t>();
    if (scale > static_cast<uint8_t>(FeatureScale::kLog)) {
      Fail(ErrorCode::kCorrupt, "unknown attack feature scale");
    }
    attack.scale = static_cast<FeatureScale>(scale);
  }
  if (in.Get<uint8_t>() != 0) {
    trajectory::Standardizer s;
    const auto width = in.Get<uint32_t>();
    if (width != static_cast<uint32_t>(attack.trajectory_n) + 1) {
      Fail(ErrorCode::kCorrupt, "standardizer width mismatch");
    }
    s.mean.resize(width);
    s.scale.resize(width);
    in.GetArray(s.mean.data(), width);
    in.GetArray(s.scale.data(), width);
    attack.standardizer = std::move(s);
  }
  std::vector<uint8_t> rest;
  while (!in.AtEnd()) rest.push_back(in.Get<uint8_t>());
  attack.model = nn::DecodeModel(rest);
  if (attack.model.input_dim() != static_cast<int>(attack.columns.size()) ||
      attack.model.num_classes() != 2) {
    Fail(ErrorCode::kCorrupt, "attack classifier shape does not match columns");
  }
  return attack;
}

void SaveAttack(const AttackModel& attack, const std::filesystem::path& path) {
  io::WriteBytes(path, EncodeAttack(attack));
}

AttackModel LoadAttack(const std::filesystem::path& path) {
  try {
    return DecodeAttack(io::ReadBytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorrupt) {
      Fail(ErrorCode::kCorrupt, path.string() + ": " + e.what());
    }
    throw;
  }
}

}  // namespace trajmia::attack
