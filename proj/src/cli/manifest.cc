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

#include "trajmia/cli/manifest.h"

#include <chrono>
#include <ctime>
#include <json.hpp>

#include "trajmia/error.h"
#include "trajmia/io.h"

namespace trajmia::cli {
namespace {

using nlohmann::ordered_json;

std::string Now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

StageStatus ParseStatus(const std::string& s) {
  if (s == "pending") return StageStatus::kPending;
  if (s == "done") return StageStatus::kDone;
  if (s == "failed") return StageStatus::kFailed;
  Fail(ErrorCode::kCorrupt, "manifest: unknown stage status '" + s + "'");
}

}  // namespace

const char* StageStatusName(StageStatus status) {
  switch (status) {
    case StageStatus::kPending: return "pending";
    case StageStatus::kDone: return "done";
    case StageStatus::kFailed: return "failed";
  }
  return "pending";
}

void RunManifest::SetDigest(const std::string& digest) {
  if (digest == config_digest) return;
  config_digest = digest;
  for (auto& [name, record] : stages) record.status = StageStatus::kPending;
}

bool RunManifest::IsDone(const std::string& step) const {
  const auto it = stages.find(step);
  return it != stages.end() && it->second.status == StageStatus::kDone &&
         it->second.digest == config_digest;
}

void RunManifest::MarkStarted(const std::string& step) {
  StageRecord& record = stages[step];
  record.status = StageStatus::kPending;
  record.started = Now();
  record.finished.clear();
}

void RunManifest::MarkFinished(const std::string& step, bool ok,
                               std::vector<std::string> artifacts) {
  StageRecord& record = stages[step];
  record.status = ok ? StageStatus::kDone : StageStatus::kFailed;
  record.digest = config_digest;
  record.finished = Now();
  record.artifacts = std::move(artifacts);
}

void RunManifest::Invalidate(const std::vector<std::string>& steps) {
  for (const std::string& step : steps) {
    const auto it = stages.find(step);
    if (it != stages.end()) it->second.status = StageStatus::kPending;
  }
}

std::string ManifestToJson(const RunManifest& manifest) {
  ordered_json stages = ordered_json::object();
  for (const auto& [name, r] : manifest.stages) {
    stages[name] = {{"status", StageStatusName(r.status)},
                    {"digest", r.digest},
                    {"started", r.started},
                    {"finished", r.finished},
                    {"artifacts", r.artifacts}};
  }
  const ordered_json j = {{"tool_version", manifest.tool_version},
                          {"config_digest", manifest.config_digest},
                          {"stages", std::move(stages)}};
  return j.dump(2) + "\n";
}

RunManifest ManifestFromJson(const std::string& text) {
  const ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) Fail(ErrorCode::kCorrupt, "manifest: invalid JSON");
  RunManifest m;
  try {
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    for (const auto& [name, r] : j.at("stages").items()) {
      StageRecord record;
      record.status = ParseStatus(r.at("status").get<std::string>());
      record.digest = r.at("digest").get<std::string>();
      record.started = r.at("started").get<std::string>();
      record.finished = r.at("finished").get<std::string>();
      record.artifacts = r.at("artifacts").get<std::vector<std::string>>();
      m.stages.emplace(name, std::move(record));
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kCorrupt, std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest LoadManifest(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / kManifestFile;
  if (!std::filesystem::exists(path)) return {};
  return ManifestFromJson(io::ReadText(path));
}

void SaveManifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  io::WriteText(dir / kManifestFile, ManifestToJson(manifest));
}

}  // namespace trajmia::cli
