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

#ifndef TRAJMIA_CLI_MANIFEST_H_
#define TRAJMIA_CLI_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace trajmia::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestFile = "manifest.json";

enum class StageStatus { kPending, kDone, kFailed };

const char* StageStatusName(StageStatus status);

struct StageRecord {
  StageStatus status = StageStatus::kPending;
  std::string digest;  // config digest the stage last ran under
  std::string started;
  std::string finished;
  std::vector<std::string> artifacts;

  bool operator==(const StageRecord&) const = default;
};

// Per-directory record of which pipeline steps completed under which
// config digest.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_digest;
  std::map<std::string, StageRecord> stages;

  // A new digest resets every step to pending.
  void SetDigest(const std::string& digest);
  bool IsDone(const std::string& step) const;
  void MarkStarted(const std::string& step);
  void MarkFinished(const std::string& step, bool ok,
                    std::vector<std::string> artifacts);
  // Resets the given steps to pending.
  void Invalidate(const std::vector<std::string>& steps);

  bool operator==(const RunManifest&) const = default;
};

std::string ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(const std::string& text);

// Absent file -> empty manifest.
RunManifest LoadManifest(const std::filesystem::path& dir);
void SaveManifest(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace trajmia::cli

#endif  // TRAJMIA_CLI_MANIFEST_H_
