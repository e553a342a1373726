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

#ifndef TRAJMIA_ATTACK_CONFIG_H_
#define TRAJMIA_ATTACK_CONFIG_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajmia/attack/attack.h"
#include "trajmia/data/dataset.h"
#include "trajmia/data/split.h"
#include "trajmia/nn/mlp.h"
#include "trajmia/nn/train.h"

namespace trajmia::attack {

enum class DataSource { kSynth, kCsv, kBinary };

struct Architecture {
  std::vector<int> hidden;  // empty: shadow copies the target, student copies the shadow
  std::optional<nn::Activation> activation;
  bool operator==(const Architecture&) const = default;
};

// Everything one experiment depends on. The adversary's knowledge (shadow
// architecture, distillation data size, training recipe) is explicit here.
struct ExperimentConfig {
  uint64_t seed = 0;

  DataSource source = DataSource::kSynth;
  std::string data_path;
  std::string label_column = "label";
  bool min_max_scale = false;
  data::SynthSpec synth = {.class_count = 10,
                           .dim = 600,
                           .per_class = 1800,
                           .cluster_spread = 0.5,
                           .center_density = 0.5,
                           .spread_jitter = 1.0,
                           .label_noise = 0.0,
                           .seed = 0};

  data::SplitSpec split = {.target_train = 2000,
                           .target_test = 2000,
                           .shadow_train = 2000,
                           .shadow_test = 2000,
                           .distill_cap = 10000,
                           .stratified = false,
                           .seed = 0};

  Architecture target = {{128}, nn::Activation::kRelu};
  Architecture shadow;
  Architecture student;

  nn::TrainConfig target_train;  // shadow training uses the same recipe
  nn::TrainConfig distill_train = {.epochs = 30, .snapshot_every = 1};
  AttackSpec attack;

  bool dp_enabled = false;
  nn::DpConfig dp;

  std::vector<std::string> baselines;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses "key = value" lines; '#' starts a comment. Unknown keys, duplicate
// keys and bad values raise kParse with the line number and key.
ExperimentConfig ParseConfig(std::string_view text,
                             std::string_view origin = "config");
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Applies one "key = value" assignment (e.g. a sweep point or CLI override).
void SetConfigValue(ExperimentConfig& cfg, std::string_view key,
                    std::string_view value);
bool IsConfigKey(std::string_view key);

// Every key with its canonical value, in a fixed order.
std::vector<std::pair<std::string, std::string>> ConfigEntries(
    const ExperimentConfig& cfg);
std::string ConfigText(const ExperimentConfig& cfg);
std::string ConfigJson(const ExperimentConfig& cfg);
ExperimentConfig ConfigFromJson(std::string_view text);
std::string ConfigDigest(const ExperimentConfig& cfg);

// Throws kInvalidArgument on inconsistent settings.
void ValidateConfig(const ExperimentConfig& cfg);

// Resolved layer dims for a role given the data shape.
std::vector<int> TargetDims(const ExperimentConfig& cfg, int input_dim,
                            int classes);
std::vector<int> ShadowDims(const ExperimentConfig& cfg, int input_dim,
                            int classes);
std::vector<int> StudentDims(const ExperimentConfig& cfg, int input_dim,
                             int classes);
nn::Activation ShadowActivation(const ExperimentConfig& cfg);
nn::Activation StudentActivation(const ExperimentConfig& cfg);

// Named seed substreams derived from cfg.seed.
uint64_t StageSeed(const ExperimentConfig& cfg, std::string_view stream);

}  // namespace trajmia::attack

#endif  // TRAJMIA_ATTACK_CONFIG_H_
