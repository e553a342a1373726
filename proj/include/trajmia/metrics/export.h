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

#ifndef TRAJMIA_METRICS_EXPORT_H_
#define TRAJMIA_METRICS_EXPORT_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajmia/metrics/metrics.h"

namespace trajmia::metrics {

// Everything one pipeline run reports: per-method evaluations plus scalar
// statistics about the trained models (accuracies, distillation fidelity).
struct RunReport {
  uint64_t seed = 0;
  std::string config_digest;
  std::vector<std::pair<std::string, double>> stats;
  std::vector<EvalReport> methods;

  const EvalReport* Find(std::string_view method) const;
  double Stat(std::string_view name) const;  // throws if absent
  bool operator==(const RunReport&) const = default;
};

std::string EvalReportToJson(const EvalReport& report);
EvalReport EvalReportFromJson(std::string_view text);

std::string RunReportToJson(const RunReport& report);
RunReport RunReportFromJson(std::string_view text);

void WriteRunReport(const RunReport& report, const std::filesystem::path& path);
RunReport ReadRunReport(const std::filesystem::path& path);

// "fpr,tpr" with one row per ROC point.
std::string RocCsv(std::span<const RocPoint> roc);
void WriteRocCsv(std::span<const RocPoint> roc,
                 const std::filesystem::path& path);

// Log-log ROC plot of one or more methods. Both axes span [kSvgAxisMin, 1];
// smaller rates are drawn at the axis minimum.
inline constexpr double kSvgAxisMin = 1e-4;
std::string RocSvg(std::span<const EvalReport> reports);
void WriteRocSvg(std::span<const EvalReport> reports,
                 const std::filesystem::path& path);

// "id,score,member" rows, one per sample.
void WriteScoresCsv(std::span<const uint64_t> ids, std::span<const double> scores,
                    std::span<const int> labels,
                    const std::filesystem::path& path);

struct ScoreTable {
  std::vector<uint64_t> ids;
  std::vector<double> scores;
  std::vector<int> labels;  // -1 where the file says NA
};
ScoreTable ReadScoresCsv(const std::filesystem::path& path);

}  // namespace trajmia::metrics

#endif  // TRAJMIA_METRICS_EXPORT_H_
