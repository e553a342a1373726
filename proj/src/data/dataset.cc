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

#include "trajmia/data/dataset.h"

#include <algorithm>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "trajmia/io.h"
#include "trajmia/rng.h"

namespace trajmia::data {

namespace fs = std::filesystem;

FeatureDataset FeatureDataset::Subset(std::span<const size_t> rows) const {
  FeatureDataset out;
  out.class_count = class_count;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  out.ids.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    Require(rows[i] < size(), "subset row out of range");
    out.features.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
    out.ids.push_back(ids[rows[i]]);
  }
  return out;
}

void Validate(const FeatureDataset& data) {
  Require(static_cast<size_t>(data.features.rows()) == data.labels.size() &&
              data.ids.size() == data.labels.size(),
          "dataset rows, labels and ids disagree in length");
  Require(data.class_count > 0 || data.empty(), "class_count must be positive");
  Require(data.features.allFinite(), "dataset contains non-finite features");
  for (int label : data.labels) {
    Require(label >= 0 && label < data.class_count,
            "label " + std::to_string(label) + " outside [0, class_count)");
  }
  std::unordered_set<uint64_t> seen(data.ids.begin(), data.ids.end());
  Require(seen.size() == data.ids.size(), "dataset ids are not unique");
}

namespace {

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  for (auto& cell : cells) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
      cell.remove_prefix(1);
    }
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' ||
                             cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
  }
  return cells;
}

[[noreturn]] void CellError(const fs::path& path, size_t row,
                            const std::string& column, const std::string& why) {
  Fail(ErrorCode::kParse, path.string() + ": row " + std::to_string(row) +
                              ", column '" + column + "': " + why);
}

}  // namespace

FeatureDataset LoadCsv(const fs::path& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kMissingArtifact, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    Fail(ErrorCode::kParse, path.string() + ": missing header row");
  }
  std::vector<std::string> header;
  for (auto cell : SplitLine(line)) header.emplace_back(cell);
  int label_index = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_index = static_cast<int>(i);
  }
  if (label_index < 0) {
    Fail(ErrorCode::kParse,
         path.string() + ": no column named '" + label_column + "'");
  }
  const int dim = static_cast<int>(header.size()) - 1;

  std::vector<float> values;
  std::vector<int> labels;
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = SplitLine(line);
    if (cells.size() != header.size()) {
      Fail(ErrorCode::kParse, path.string() + ": row " + std::to_string(row) +
                                  " has " + std::to_string(cells.size()) +
                                  " cells, expected " +
                                  std::to_string(header.size()));
    }
    for (size_t c = 0; c < cells.size(); ++c) {
      std::string_view cell = cells[c];
      if (cell.empty()) CellError(path, row, header[c], "missing value");
      if (static_cast<int>(c) == label_index) {
        int label = 0;
        auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                         label);
        if (ec != std::errc() || end != cell.data() + cell.size() ||
            label < 0) {
          CellError(path, row, header[c],
                    "label '" + std::string(cell) +
                        "' is not a non-negative integer");
        }
        labels.push_back(label);
      } else {
        float value = 0.0f;
        auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                         value);
        if (ec != std::errc() || end != cell.data() + cell.size()) {
          CellError(path, row, header[c],
                    "'" + std::string(cell) + "' is not a number");
        }
        if (!std::isfinite(value)) CellError(path, row, header[c], "non-finite");
        values.push_back(value);
      }
    }
  }

  FeatureDataset data;
  const auto n = static_cast<Eigen::Index>(labels.size());
  data.features = Eigen::Map<nn::MatrixF>(values.data(), n, dim);
  data.labels = std::move(labels);
  data.class_count = 0;
  for (int label : data.labels) data.class_count = std::max(data.class_count, label + 1);
  data.ids.resize(data.labels.size());
  for (size_t i = 0; i < data.ids.size(); ++i) data.ids[i] = i;
  return data;
}

void SaveCsv(const FeatureDataset& data, const fs::path& path) {
  std::string text;
  for (int c = 0; c < data.dim(); ++c) text += "f" + std::to_string(c) + ",";
  text += "label\n";
  char buf[32];
  for (size_t r = 0; r < data.size(); ++r) {
    for (int c = 0; c < data.dim(); ++c) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf),
                                     data.features(static_cast<Eigen::Index>(r), c));
      text.append(buf, end);
      text += ',';
    }
    text += std::to_string(data.labels[r]);
    text += '\n';
  }
  io::WriteText(path, text);
}

void SaveBinary(const FeatureDataset& data, const fs::path& path) {
  Validate(data);
  io::ByteWriter out;
  out.Bytes("TMDS");
  out.Put<uint16_t>(1);
  out.Put<uint64_t>(data.size());
  out.Put<uint32_t>(static_cast<uint32_t>(data.dim()));
  out.Put<uint32_t>(static_cast<uint32_t>(data.class_count));
  out.PutArray(data.features.data(), data.features.size());
  for (int label : data.labels) out.Put<uint32_t>(static_cast<uint32_t>(label));
  out.PutArray(data.ids.data(), data.ids.size());
  io::WriteBytes(path, out.Take());
}

FeatureDataset LoadBinary(const fs::path& path) {
  const std::vector<uint8_t> bytes = io::ReadBytes(path);
  io::ByteReader in(bytes, path.string());
  in.Expect("TMDS");
  if (in.Get<uint16_t>() != 1) Fail(ErrorCode::kCorrupt, "unsupported dataset version");
  const auto n = in.Get<uint64_t>();
  const auto dim = in.Get<uint32_t>();
  FeatureDataset data;
  data.class_count = static_cast<int>(in.Get<uint32_t>());
  if (n * dim * 4 > bytes.size()) Fail(ErrorCode::kCorrupt, "dataset size header too large");
  data.features.resize(static_cast<Eigen::Index>(n), dim);
  in.GetArray(data.features.data(), data.features.size());
  data.labels.resize(n);
  for (auto& label : data.labels) label = static_cast<int>(in.Get<uint32_t>());
  data.ids.resize(n);
  in.GetArray(data.ids.data(), n);
  in.ExpectEnd();
  try {
    Validate(data);
  } catch (const Error& e) {
    Fail(ErrorCode::kCorrupt, path.string() + ": " + e.what());
  }
  return data;
}

FeatureDataset SynthGenerate(const SynthSpec& spec) {
  Require(spec.class_count > 0 && spec.dim > 0 && spec.per_class > 0,
          "synthetic class_count, dim and per_class must be positive");
  Require(spec.cluster_spread >= 0.0, "cluster_spread must be non-negative");
  Require(spec.spread_jitter >= 1.0, "spread_jitter must be >= 1");
  Require(spec.label_noise >= 0.0 && spec.label_noise <= 1.0,
          "label_noise must lie in [0, 1]");
  Rng rng(spec.seed);
  nn::MatrixF centers(spec.class_count, spec.dim);
  for (int c = 0; c < spec.class_count; ++c) {
    for (int j = 0; j < spec.dim; ++j) {
      centers(c, j) = rng.Uniform() < spec.center_density ? 1.0f : 0.0f;
    }
  }
  Require(spec.modes_per_class >= 1, "modes_per_class must be >= 1");
  Require(spec.mode_spread >= 0.0, "mode_spread must be non-negative");
  const int modes = spec.modes_per_class;
  nn::MatrixF offsets;
  std::vector<double> mode_cdf;
  if (modes > 1) {
    offsets.resize(static_cast<Eigen::Index>(spec.class_count) * modes, spec.dim);
    for (Eigen::Index r = 0; r < offsets.rows(); ++r) {
      for (int j = 0; j < spec.dim; ++j) {
        offsets(r, j) = static_cast<float>(spec.mode_spread * rng.Normal());
      }
    }
    double total = 0.0;
    for (int m = 0; m < modes; ++m) {
      total += 1.0 / (m + 1);
      mode_cdf.push_back(total);
    }
    for (double& c : mode_cdf) c /= total;
  }
  const size_t n = static_cast<size_t>(spec.class_count) * spec.per_class;
  FeatureDataset data;
  data.class_count = spec.class_count;
  data.features.resize(static_cast<Eigen::Index>(n), spec.dim);
  data.labels.resize(n);
  data.ids.resize(n);
  const double log_jitter = std::log(spec.spread_jitter);
  for (size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % spec.class_count);
    double spread = spec.cluster_spread;
    if (spec.spread_jitter > 1.0) {
      spread *= std::exp(rng.Uniform(-log_jitter, log_jitter));
    }
    const auto row = static_cast<Eigen::Index>(i);
    for (int j = 0; j < spec.dim; ++j) {
      data.features(row, j) =
          centers(label, j) + static_cast<float>(spread * rng.Normal());
    }
    if (modes > 1) {
      const double u = rng.Uniform();
      const auto mode = static_cast<int>(
          std::upper_bound(mode_cdf.begin(), mode_cdf.end() - 1, u) -
          mode_cdf.begin());
      data.features.row(row) += offsets.row(label * modes + mode);
    }
    data.labels[i] = label;
    if (spec.label_noise > 0.0 && rng.Uniform() < spec.label_noise) {
      data.labels[i] = static_cast<int>(rng.Below(spec.class_count));
    }
    data.ids[i] = i;
  }
  return data;
}

void MinMaxScale(FeatureDataset& data) {
  for (Eigen::Index c = 0; c < data.features.cols(); ++c) {
    auto col = data.features.col(c);
    const float lo = col.minCoeff();
    const float hi = col.maxCoeff();
    if (hi > lo) {
      col = (col.array() - lo) / (hi - lo);
    } else {
      col.setZero();
    }
  }
}

}  // namespace trajmia::data
