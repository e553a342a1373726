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

#include "trajmia/attack/config.h"

#include <charconv>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>

#include "trajmia/baselines/baselines.h"
#include "trajmia/io.h"
#include "trajmia/rng.h"

namespace trajmia::attack {
namespace {

[[noreturn]] void BadValue(std::string_view value, std::string_view expected) {
  Fail(ErrorCode::kParse,
       "invalid value '" + std::string(value) + "' (expected " +
           std::string(expected) + ")");
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T ParseNumber(std::string_view s, std::string_view expected) {
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) BadValue(s, expected);
  return value;
}

int ParsePositive(std::string_view s) {
  const int v = ParseNumber<int>(s, "a positive integer");
  if (v < 1) BadValue(s, "a positive integer");
  return v;
}

size_t ParseCount(std::string_view s) {
  return ParseNumber<size_t>(s, "a non-negative integer");
}

double ParseReal(std::string_view s) {
  const double v = ParseNumber<double>(s, "a real number");
  if (!std::isfinite(v)) BadValue(s, "a finite real number");
  return v;
}

bool ParseBool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  BadValue(s, "true or false");
}

std::vector<std::string> SplitList(std::string_view s) {
  std::vector<std::string> items;
  if (Trim(s).empty()) return items;
  size_t start = 0;
  while (true) {
    const size_t comma = s.find(',', start);
    items.emplace_back(Trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<int> ParseDims(std::string_view s, bool allow_same) {
  if (allow_same && s == "same") return {};
  std::vector<int> dims;
  for (const std::string& item : SplitList(s)) {
    dims.push_back(ParsePositive(item));
  }
  if (dims.empty()) BadValue(s, "a comma-separated list of widths");
  return dims;
}

std::string FormatDims(const std::vector<int>& dims) {
  if (dims.empty()) return "same";
  std::string out;
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(dims[i]);
  }
  return out;
}

std::string FormatBool(bool b) { return b ? "true" : "false"; }

nn::Schedule ParseSchedule(std::string_view s) {
  if (s == "cosine") return nn::Schedule::kCosine;
  if (s == "constant") return nn::Schedule::kConstant;
  BadValue(s, "cosine or constant");
}

std::string FormatSchedule(nn::Schedule s) {
  return s == nn::Schedule::kCosine ? "cosine" : "constant";
}

std::optional<nn::Activation> ParseOptionalActivation(std::string_view s,
                                                      bool allow_same) {
  if (allow_same && s == "same") return std::nullopt;
  if (s == "relu") return nn::Activation::kRelu;
  if (s == "tanh") return nn::Activation::kTanh;
  BadValue(s, allow_same ? "relu, tanh or same" : "relu or tanh");
}

std::string FormatActivation(const std::optional<nn::Activation>& a) {
  return a ? nn::ActivationName(*a) : "same";
}

struct Entry {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

// `field` maps a (const or mutable) config onto one of its TrainConfigs.
template <typename Field>
void AddTrainEntries(std::vector<Entry>& table, const std::string& prefix,
                     Field field) {
  table.push_back({prefix + ".epochs",
                   [=](const auto& c) { return std::to_string(field(c).epochs); },
                   [=](auto& c, std::string_view v) {
                     field(c).epochs = ParsePositive(v);
                   }});
  table.push_back({prefix + ".batch_size",
                   [=](const auto& c) {
                     return std::to_string(field(c).batch_size);
                   },
                   [=](auto& c, std::string_view v) {
                     field(c).batch_size = ParsePositive(v);
                   }});
  table.push_back({prefix + ".learning_rate",
                   [=](const auto& c) {
                     return io::FormatDouble(field(c).learning_rate);
                   },
                   [=](auto& c, std::string_view v) {
                     field(c).learning_rate = ParseReal(v);
                   }});
  table.push_back({prefix + ".momentum",
                   [=](const auto& c) { return io::FormatDouble(field(c).momentum); },
                   [=](auto& c, std::string_view v) {
                     field(c).momentum = ParseReal(v);
                   }});
  table.push_back({prefix + ".weight_decay",
                   [=](const auto& c) {
                     return io::FormatDouble(field(c).weight_decay);
                   },
                   [=](auto& c, std::string_view v) {
                     field(c).weight_decay = ParseReal(v);
                   }});
  table.push_back({prefix + ".schedule",
                   [=](const auto& c) { return FormatSchedule(field(c).schedule); },
                   [=](auto& c, std::string_view v) {
                     field(c).schedule = ParseSchedule(v);
                   }});
}

void AddArchEntries(std::vector<Entry>& table, const std::string& prefix,
                    Architecture ExperimentConfig::*member, bool allow_same) {
  table.push_back({prefix + ".hidden",
                   [=](const auto& c) { return FormatDims((c.*member).hidden); },
                   [=](auto& c, std::string_view v) {
                     (c.*member).hidden = ParseDims(v, allow_same);
                   }});
  table.push_back(
      {prefix + ".activation",
       [=](const auto& c) { return FormatActivation((c.*member).activation); },
       [=](auto& c, std::string_view v) {
         (c.*member).activation = ParseOptionalActivation(v, allow_same);
       }});
}

std::vector<Entry> BuildTable() {
  std::vector<Entry> t;
  t.push_back({"seed", [](const auto& c) { return std::to_string(c.seed); },
               [](auto& c, std::string_view v) {
                 c.seed = ParseNumber<uint64_t>(v, "an unsigned 64-bit integer");
               }});

  t.push_back({"data.source",
               [](const auto& c) -> std::string {
                 switch (c.source) {
                   case DataSource::kSynth: return "synth";
                   case DataSource::kCsv: return "csv";
                   case DataSource::kBinary: return "binary";
                 }
                 return "synth";
               },
               [](auto& c, std::string_view v) {
                 if (v == "synth") {
                   c.source = DataSource::kSynth;
                 } else if (v == "csv") {
                   c.source = DataSource::kCsv;
                 } else if (v == "binary") {
                   c.source = DataSource::kBinary;
                 } else {
                   BadValue(v, "synth, csv or binary");
                 }
               }});
  t.push_back({"data.path", [](const auto& c) { return c.data_path; },
               [](auto& c, std::string_view v) { c.data_path = v; }});
  t.push_back({"data.label_column", [](const auto& c) { return c.label_column; },
               [](auto& c, std::string_view v) {
                 if (v.empty()) BadValue(v, "a column name");
                 c.label_column = v;
               }});
  t.push_back({"data.min_max_scale",
               [](const auto& c) { return FormatBool(c.min_max_scale); },
               [](auto& c, std::string_view v) { c.min_max_scale = ParseBool(v); }});

  t.push_back({"synth.class_count",
               [](const auto& c) { return std::to_string(c.synth.class_count); },
               [](auto& c, std::string_view v) {
                 c.synth.class_count = ParsePositive(v);
               }});
  t.push_back({"synth.dim",
               [](const auto& c) { return std::to_string(c.synth.dim); },
               [](auto& c, std::string_view v) { c.synth.dim = ParsePositive(v); }});
  t.push_back({"synth.per_class",
               [](const auto& c) { return std::to_string(c.synth.per_class); },
               [](auto& c, std::string_view v) {
                 c.synth.per_class = ParsePositive(v);
               }});
  t.push_back({"synth.cluster_spread",
               [](const auto& c) { return io::FormatDouble(c.synth.cluster_spread); },
               [](auto& c, std::string_view v) {
                 c.synth.cluster_spread = ParseReal(v);
               }});
  t.push_back({"synth.center_density",
               [](const auto& c) { return io::FormatDouble(c.synth.center_density); },
               [](auto& c, std::string_view v) {
                 c.synth.center_density = ParseReal(v);
               }});
  t.push_back({"synth.spread_jitter",
               [](const auto& c) { return io::FormatDouble(c.synth.spread_jitter); },
               [](auto& c, std::string_view v) {
                 c.synth.spread_jitter = ParseReal(v);
               }});
  t.push_back({"synth.label_noise",
               [](const auto& c) { return io::FormatDouble(c.synth.label_noise); },
               [](auto& c, std::string_view v) {
                 c.synth.label_noise = ParseReal(v);
               }});
  t.push_back({"synth.modes_per_class",
               [](const auto& c) { return std::to_string(c.synth.modes_per_class); },
               [](auto& c, std::string_view v) {
                 c.synth.modes_per_class = ParsePositive(v);
               }});
  t.push_back({"synth.mode_spread",
               [](const auto& c) { return io::FormatDouble(c.synth.mode_spread); },
               [](auto& c, std::string_view v) {
                 c.synth.mode_spread = ParseReal(v);
               }});

  t.push_back({"split.target_train",
               [](const auto& c) { return std::to_string(c.split.target_train); },
               [](auto& c, std::string_view v) { c.split.target_train = ParseCount(v); }});
  t.push_back({"split.target_test",
               [](const auto& c) { return std::to_string(c.split.target_test); },
               [](auto& c, std::string_view v) { c.split.target_test = ParseCount(v); }});
  t.push_back({"split.shadow_train",
               [](const auto& c) { return std::to_string(c.split.shadow_train); },
               [](auto& c, std::string_view v) { c.split.shadow_train = ParseCount(v); }});
  t.push_back({"split.shadow_test",
               [](const auto& c) { return std::to_string(c.split.shadow_test); },
               [](auto& c, std::string_view v) { c.split.shadow_test = ParseCount(v); }});
  t.push_back({"split.distill_cap",
               [](const auto& c) {
                 return c.split.distill_cap ? std::to_string(*c.split.distill_cap)
                                            : std::string("none");
               },
               [](auto& c, std::string_view v) {
                 if (v == "none") {
                   c.split.distill_cap.reset();
                 } else {
                   c.split.distill_cap = ParseCount(v);
                 }
               }});
  t.push_back({"split.stratified",
               [](const auto& c) { return FormatBool(c.split.stratified); },
               [](auto& c, std::string_view v) { c.split.stratified = ParseBool(v); }});

  AddArchEntries(t, "target", &ExperimentConfig::target, false);
  AddTrainEntries(t, "target", [](auto& c) -> auto& { return c.target_train; });
  AddArchEntries(t, "shadow", &ExperimentConfig::shadow, true);
  AddArchEntries(t, "student", &ExperimentConfig::student, true);
  AddTrainEntries(t, "distill",
                  [](auto& c) -> auto& { return c.distill_train; });

  t.push_back({"attack.hidden",
               [](const auto& c) { return FormatDims(c.attack.hidden); },
               [](auto& c, std::string_view v) {
                 c.attack.hidden = ParseDims(v, false);
               }});
  AddTrainEntries(t, "attack", [](auto& c) -> auto& { return c.attack.train; });
  t.push_back({"attack.standardize",
               [](const auto& c) { return FormatBool(c.attack.standardize); },
               [](auto& c, std::string_view v) {
                 c.attack.standardize = ParseBool(v);
               }});
  t.push_back({"attack.feature_scale",
               [](const auto& c) { return std::string(FeatureScaleName(c.attack.scale)); },
               [](auto& c, std::string_view v) {
                 if (v != "raw" && v != "log") BadValue(v, "raw or log");
                 c.attack.scale = ParseFeatureScale(v);
               }});

  t.push_back({"dp.enabled", [](const auto& c) { return FormatBool(c.dp_enabled); },
               [](auto& c, std::string_view v) { c.dp_enabled = ParseBool(v); }});
  t.push_back({"dp.clip_bound",
               [](const auto& c) { return io::FormatDouble(c.dp.clip_bound); },
               [](auto& c, std::string_view v) { c.dp.clip_bound = ParseReal(v); }});
  t.push_back({"dp.noise_multiplier",
               [](const auto& c) { return io::FormatDouble(c.dp.noise_multiplier); },
               [](auto& c, std::string_view v) {
                 c.dp.noise_multiplier = ParseReal(v);
               }});

  t.push_back({"baselines",
               [](const auto& c) {
                 std::string out;
                 for (size_t i = 0; i < c.baselines.size(); ++i) {
                   if (i > 0) out += ",";
                   out += c.baselines[i];
                 }
                 return out;
               },
               [](auto& c, std::string_view v) {
                 std::vector<std::string> kinds = SplitList(v);
                 for (const std::string& k : kinds) {
                   if (!baselines::ParseKind(k)) {
                     BadValue(k, "a baseline kind such as yeom_loss");
                   }
                 }
                 c.baselines = std::move(kinds);
               }});
  return t;
}

const std::vector<Entry>& Table() {
  static const std::vector<Entry> table = BuildTable();
  return table;
}

const Entry* FindEntry(std::string_view key) {
  for (const Entry& e : Table()) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

}  // namespace

bool IsConfigKey(std::string_view key) { return FindEntry(key) != nullptr; }

void SetConfigValue(ExperimentConfig& cfg, std::string_view key,
                    std::string_view value) {
  const Entry* entry = FindEntry(key);
  if (entry == nullptr) {
    Fail(ErrorCode::kParse, "unknown key '" + std::string(key) + "'");
  }
  try {
    entry->set(cfg, Trim(value));
  } catch (const Error& e) {
    Fail(ErrorCode::kParse, "key '" + std::string(key) + "': " + e.what());
  }
}

ExperimentConfig ParseConfig(std::string_view text, std::string_view origin) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where =
        std::string(origin) + ":" + std::to_string(line_no) + ": ";
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kParse, where + "expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) Fail(ErrorCode::kParse, where + "missing key");
    if (!seen.insert(key).second) {
      Fail(ErrorCode::kParse, where + "duplicate key '" + key + "'");
    }
    try {
      SetConfigValue(cfg, key, line.substr(eq + 1));
    } catch (const Error& e) {
      Fail(ErrorCode::kParse, where + e.what());
    }
    if (end == text.size()) break;
  }
  try {
    ValidateConfig(cfg);
  } catch (const Error& e) {
    Fail(ErrorCode::kParse, std::string(origin) + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  const std::string text = io::ReadText(path);
  if (path.extension() == ".json") return ConfigFromJson(text);
  return ParseConfig(text, path.string());
}

std::vector<std::pair<std::string, std::string>> ConfigEntries(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const Entry& e : Table()) entries.emplace_back(e.key, e.get(cfg));
  return entries;
}

std::string ConfigText(const ExperimentConfig& cfg) {
  std::string text;
  for (const auto& [key, value] : ConfigEntries(cfg)) {
    text += key + " = " + value + "\n";
  }
  return text;
}

std::string ConfigJson(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, value] : ConfigEntries(cfg)) j[key] = value;
  return j.dump(2) + "\n";
}

ExperimentConfig ConfigFromJson(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    Fail(ErrorCode::kParse, "config.json is not a JSON object");
  }
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) {
      Fail(ErrorCode::kParse, "config.json: key '" + key + "' is not a string");
    }
    SetConfigValue(cfg, key, value.get<std::string>());
  }
  ValidateConfig(cfg);
  return cfg;
}

std::string ConfigDigest(const ExperimentConfig& cfg) {
  return io::HexDigest(ConfigText(cfg));
}

void ValidateConfig(const ExperimentConfig& cfg) {
  if (cfg.source != DataSource::kSynth) {
    Require(!cfg.data_path.empty(), "data.path is required for file sources");
  }
  Require(cfg.synth.class_count >= 2, "synth.class_count must be >= 2");
  Require(cfg.synth.cluster_spread >= 0.0, "synth.cluster_spread must be >= 0");
  Require(cfg.synth.center_density >= 0.0 && cfg.synth.center_density <= 1.0,
          "synth.center_density must be in [0, 1]");
  Require(cfg.synth.mode_spread >= 0.0, "synth.mode_spread must be >= 0");
  Require(cfg.synth.spread_jitter >= 1.0, "synth.spread_jitter must be >= 1");
  Require(cfg.synth.label_noise >= 0.0 && cfg.synth.label_noise <= 1.0,
          "synth.label_noise must be in [0, 1]");
  Require(cfg.split.target_train >= 1 && cfg.split.target_test >= 1 &&
              cfg.split.shadow_train >= 1 && cfg.split.shadow_test >= 1,
          "all split sizes must be >= 1");
  Require(!cfg.split.distill_cap || *cfg.split.distill_cap >= 1,
          "split.distill_cap must be >= 1");
  Require(!cfg.target.hidden.empty(), "target.hidden must list widths");
  Require(cfg.target.activation.has_value(), "target.activation must be set");
  nn::ValidateTrainConfig(cfg.target_train);
  nn::ValidateTrainConfig(cfg.distill_train);
  nn::ValidateTrainConfig(cfg.attack.train);
  Require(cfg.distill_train.snapshot_every == 1,
          "distillation must snapshot every epoch");
  Require(!cfg.attack.hidden.empty(), "attack.hidden must list widths");
  if (cfg.dp_enabled) nn::ValidateDpConfig(cfg.dp);
}

std::vector<int> TargetDims(const ExperimentConfig& cfg, int input_dim,
                            int classes) {
  std::vector<int> dims = {input_dim};
  dims.insert(dims.end(), cfg.target.hidden.begin(), cfg.target.hidden.end());
  dims.push_back(classes);
  return dims;
}

std::vector<int> ShadowDims(const ExperimentConfig& cfg, int input_dim,
                            int classes) {
  if (cfg.shadow.hidden.empty()) return TargetDims(cfg, input_dim, classes);
  std::vector<int> dims = {input_dim};
  dims.insert(dims.end(), cfg.shadow.hidden.begin(), cfg.shadow.hidden.end());
  dims.push_back(classes);
  return dims;
}

std::vector<int> StudentDims(const ExperimentConfig& cfg, int input_dim,
                             int classes) {
  if (cfg.student.hidden.empty()) return ShadowDims(cfg, input_dim, classes);
  std::vector<int> dims = {input_dim};
  dims.insert(dims.end(), cfg.student.hidden.begin(), cfg.student.hidden.end());
  dims.push_back(classes);
  return dims;
}

nn::Activation ShadowActivation(const ExperimentConfig& cfg) {
  return cfg.shadow.activation.value_or(*cfg.target.activation);
}

nn::Activation StudentActivation(const ExperimentConfig& cfg) {
  return cfg.student.activation.value_or(ShadowActivation(cfg));
}

uint64_t StageSeed(const ExperimentConfig& cfg, std::string_view stream) {
  return DeriveSeed(cfg.seed, stream);
}

}  // namespace trajmia::attack
