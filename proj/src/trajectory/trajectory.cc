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

#include "trajmia/trajectory/trajectory.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "trajmia/io.h"
#include "trajmia/nn/losses.h"

namespace trajmia::trajectory {

void ValidateSet(const TrajectorySet& set) {
  for (const TrajectoryRecord& record : set.records) {
    if (static_cast<int>(record.losses.size()) != set.n + 1) {
      Fail(ErrorCode::kCorrupt, "trajectory for sample " +
                                    std::to_string(record.id) + " has " +
                                    std::to_string(record.losses.size()) +
                                    " losses, expected " +
                                    std::to_string(set.n + 1));
    }
    for (double loss : record.losses) {
      if (!std::isfinite(loss) || loss < 0.0) {
        Fail(ErrorCode::kCorrupt,
             "invalid loss in trajectory of sample " + std::to_string(record.id));
      }
    }
  }
}

std::vector<double> ClampedLosses(const nn::MatrixD& posteriors,
                                  std::span<const int> labels) {
  Require(static_cast<size_t>(posteriors.rows()) == labels.size(),
          "posterior rows and labels disagree");
  std::vector<double> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double loss = nn::CrossEntropy(
        labels[i], std::span<const double>(posteriors.row(row).data(),
                                           posteriors.cols()));
    out[i] = std::clamp(loss, 0.0, kLossClamp);
  }
  return out;
}

TrajectorySet Extract(const distill::SnapshotSeries& series,
                      const nn::MatrixD& original_posteriors,
                      const data::FeatureDataset& samples,
                      std::optional<int> membership,
                      const std::string& provenance) {
  distill::ValidateSeries(series);
  Require(series.snapshots.front().model.input_dim() == samples.dim(),
          "sample width does not match snapshot input dim");
  const int n = series.length();
  TrajectorySet set;
  set.n = n;
  set.provenance = provenance;
  set.records.resize(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    set.records[i].id = samples.ids[i];
    set.records[i].member = membership;
    set.records[i].losses.resize(n + 1);
  }
  for (int e = 0; e < n; ++e) {
    const nn::MatrixD post =
        nn::Posteriors(series.snapshots[e].model, samples.features);
    const std::vector<double> losses = ClampedLosses(post, samples.labels);
    for (size_t i = 0; i < samples.size(); ++i) {
      set.records[i].losses[e] = losses[i];
    }
  }
  const std::vector<double> original =
      ClampedLosses(original_posteriors, samples.labels);
  for (size_t i = 0; i < samples.size(); ++i) {
    set.records[i].losses[n] = original[i];
  }
  return set;
}

TrajectorySet Extract(const distill::SnapshotSeries& series,
                      const nn::MlpModel& original,
                      const data::FeatureDataset& samples,
                      std::optional<int> membership,
                      const std::string& provenance) {
  return Extract(series, nn::Posteriors(original, samples.features), samples,
                 membership, provenance);
}

TrajectorySet Extract(const distill::SnapshotSeries& series,
                      distill::TeacherOracle& original,
                      const data::FeatureDataset& samples,
                      std::optional<int> membership,
                      const std::string& provenance) {
  return Extract(series, original.Query(samples.features), samples, membership,
                 provenance);
}

int HardnessStableEpoch(const distill::SnapshotSeries& series,
                        std::span<const float> sample) {
  distill::ValidateSeries(series);
  const auto dim = static_cast<Eigen::Index>(sample.size());
  Eigen::Map<const nn::MatrixF> row(sample.data(), 1, dim);
  std::vector<int> predicted;
  for (const nn::Snapshot& snap : series.snapshots) {
    predicted.push_back(nn::Predict(snap.model, row)[0]);
  }
  int epoch = series.length();
  while (epoch > 1 && predicted[epoch - 2] == predicted.back()) --epoch;
  return epoch;
}

Standardizer Standardizer::Fit(const TrajectorySet& set) {
  Standardizer s;
  const size_t width = static_cast<size_t>(set.n) + 1;
  s.mean.assign(width, 0.0);
  s.scale.assign(width, 1.0);
  if (set.records.empty()) return s;
  const double count = static_cast<double>(set.records.size());
  for (const auto& r : set.records) {
    for (size_t j = 0; j < width; ++j) s.mean[j] += r.losses[j];
  }
  for (double& m : s.mean) m /= count;
  std::vector<double> var(width, 0.0);
  for (const auto& r : set.records) {
    for (size_t j = 0; j < width; ++j) {
      const double d = r.losses[j] - s.mean[j];
      var[j] += d * d;
    }
  }
  for (size_t j = 0; j < width; ++j) {
    const double sd = std::sqrt(var[j] / count);
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::Apply(std::span<const double> losses) const {
  std::vector<double> out(losses.size());
  for (size_t j = 0; j < losses.size(); ++j) {
    out[j] = (losses[j] - mean[j]) / scale[j];
  }
  return out;
}

nn::MatrixF FeatureMatrix(const TrajectorySet& set,
                          std::span<const int> columns,
                          const Standardizer* standardizer) {
  nn::MatrixF features(static_cast<Eigen::Index>(set.records.size()),
                       static_cast<Eigen::Index>(columns.size()));
  for (size_t i = 0; i < set.records.size(); ++i) {
    const std::vector<double>& raw = set.records[i].losses;
    std::vector<double> scaled;
    if (standardizer != nullptr) scaled = standardizer->Apply(raw);
    const std::vector<double>& values = standardizer ? scaled : raw;
    for (size_t j = 0; j < columns.size(); ++j) {
      Require(columns[j] >= 0 && columns[j] <= set.n,
              "trajectory column out of range");
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<float>(values[columns[j]]);
    }
  }
  return features;
}

void SaveCsv(const TrajectorySet& set, const std::filesystem::path& path) {
  ValidateSet(set);
  std::string text = "id";
  for (int e = 1; e <= set.n; ++e) text += ",l_" + std::to_string(e);
  text += ",l_orig,member\n";
  for (const TrajectoryRecord& r : set.records) {
    text += std::to_string(r.id);
    for (double loss : r.losses) {
      text += ',';
      text += io::FormatDouble(loss);
    }
    text += ',';
    text += r.member ? std::to_string(*r.member) : "NA";
    text += '\n';
  }
  io::WriteText(path, text);
}

TrajectorySet LoadCsv(const std::filesystem::path& path) {
  std::istringstream in(io::ReadText(path));
  std::string line;
  if (!std::getline(in, line)) {
    Fail(ErrorCode::kCorrupt, path.string() + ": empty trajectory file");
  }
  const auto columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns < 4) Fail(ErrorCode::kCorrupt, path.string() + ": bad header");
  TrajectorySet set;
  set.n = static_cast<int>(columns) - 3;
  set.provenance = path.filename().string();
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (static_cast<long>(cells.size()) != columns) {
      Fail(ErrorCode::kCorrupt,
           path.string() + ": row " + std::to_string(row) + " has wrong width");
    }
    TrajectoryRecord record;
    auto bad = [&](const std::string& what) {
      Fail(ErrorCode::kCorrupt,
           path.string() + ": row " + std::to_string(row) + ": " + what);
    };
    {
      const std::string& s = cells[0];
      auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), record.id);
      if (ec != std::errc() || end != s.data() + s.size()) bad("bad id");
    }
    for (int j = 1; j <= set.n + 1; ++j) {
      const std::string& s = cells[j];
      double value = 0.0;
      auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || end != s.data() + s.size()) bad("bad loss");
      record.losses.push_back(value);
    }
    const std::string& member = cells.back();
    if (member == "1") {
      record.member = 1;
    } else if (member == "0") {
      record.member = 0;
    } else if (member != "NA") {
      bad("member must be 0, 1 or NA");
    }
    set.records.push_back(std::move(record));
  }
  ValidateSet(set);
  return set;
}

}  // namespace trajmia::trajectory
