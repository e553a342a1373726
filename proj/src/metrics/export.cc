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

#include "trajmia/metrics/export.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "trajmia/error.h"
#include "trajmia/io.h"

namespace trajmia::metrics {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json ToJson(const EvalReport& r) {
  ordered_json roc = ordered_json::array();
  for (const RocPoint& p : r.roc) roc.push_back({p.fpr, p.tpr});
  ordered_json tpr = ordered_json::array();
  for (const TprAt& t : r.tpr_at_fpr) {
    tpr.push_back({{"fpr", t.fpr}, {"tpr", t.tpr}});
  }
  ordered_json bins = ordered_json::array();
  for (const LossBin& b : r.loss_ranges) {
    ordered_json bin = {{"name", b.name},
                        {"lower", b.lower},
                        {"upper", nullptr},
                        {"members", b.members},
                        {"nonmembers", b.nonmembers},
                        {"tpr_at_low_fpr", nullptr}};
    if (std::isfinite(b.upper)) bin["upper"] = b.upper;
    if (b.tpr_at_low_fpr) bin["tpr_at_low_fpr"] = *b.tpr_at_low_fpr;
    bins.push_back(std::move(bin));
  }
  return {{"method", r.method},
          {"seed", r.seed},
          {"config_digest", r.config_digest},
          {"auc", r.auc},
          {"balanced_accuracy", r.balanced_accuracy.value},
          {"balanced_accuracy_threshold", r.balanced_accuracy.threshold},
          {"tpr_at_fpr", std::move(tpr)},
          {"loss_ranges", std::move(bins)},
          {"roc", std::move(roc)},
          {"ids", r.ids},
          {"scores", r.scores},
          {"labels", r.labels}};
}

template <typename Json>
EvalReport FromJson(const Json& j) {
  EvalReport r;
  r.method = j.at("method").template get<std::string>();
  r.seed = j.at("seed").template get<uint64_t>();
  r.config_digest = j.at("config_digest").template get<std::string>();
  r.auc = j.at("auc").template get<double>();
  r.balanced_accuracy.value = j.at("balanced_accuracy").template get<double>();
  r.balanced_accuracy.threshold =
      j.at("balanced_accuracy_threshold").template get<double>();
  for (const auto& t : j.at("tpr_at_fpr")) {
    r.tpr_at_fpr.push_back({t.at("fpr").template get<double>(), t.at("tpr").template get<double>()});
  }
  for (const auto& b : j.at("loss_ranges")) {
    LossBin bin;
    bin.name = b.at("name").template get<std::string>();
    bin.lower = b.at("lower").template get<double>();
    bin.upper = b.at("upper").is_null() ? std::numeric_limits<double>::infinity()
                                        : b.at("upper").template get<double>();
    bin.members = b.at("members").template get<size_t>();
    bin.nonmembers = b.at("nonmembers").template get<size_t>();
    if (!b.at("tpr_at_low_fpr").is_null()) {
      bin.tpr_at_low_fpr = b.at("tpr_at_low_fpr").template get<double>();
    }
    r.loss_ranges.push_back(std::move(bin));
  }
  for (const auto& p : j.at("roc")) {
    r.roc.push_back({p.at(0).template get<double>(), p.at(1).template get<double>()});
  }
  r.ids = j.at("ids").template get<std::vector<uint64_t>>();
  r.scores = j.at("scores").template get<std::vector<double>>();
  r.labels = j.at("labels").template get<std::vector<int>>();
  return r;
}

json Parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorrupt, std::string(what) + ": " + e.what());
  }
}

}  // namespace

const EvalReport* RunReport::Find(std::string_view method) const {
  for (const EvalReport& r : methods) {
    if (r.method == method) return &r;
  }
  return nullptr;
}

double RunReport::Stat(std::string_view name) const {
  for (const auto& [key, value] : stats) {
    if (key == name) return value;
  }
  Fail(ErrorCode::kInvalidArgument, "report has no statistic " + std::string(name));
}

std::string EvalReportToJson(const EvalReport& report) {
  return ToJson(report).dump(1) + "\n";
}

EvalReport EvalReportFromJson(std::string_view text) {
  const json j = Parse(text, "evaluation report");
  try {
    return FromJson(j);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorrupt, std::string("evaluation report: ") + e.what());
  }
}

std::string RunReportToJson(const RunReport& report) {
  ordered_json stats = ordered_json::object();
  for (const auto& [key, value] : report.stats) stats[key] = value;
  ordered_json methods = ordered_json::array();
  for (const EvalReport& r : report.methods) methods.push_back(ToJson(r));
  const ordered_json j = {{"seed", report.seed},
                          {"config_digest", report.config_digest},
                          {"stats", std::move(stats)},
                          {"methods", std::move(methods)}};
  return j.dump(1) + "\n";
}

RunReport RunReportFromJson(std::string_view text) {
  const ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) Fail(ErrorCode::kCorrupt, "run report: invalid JSON");
  RunReport report;
  try {
    report.seed = j.at("seed").get<uint64_t>();
    report.config_digest = j.at("config_digest").get<std::string>();
    for (const auto& [key, value] : j.at("stats").items()) {
      report.stats.emplace_back(key, value.get<double>());
    }
    for (const auto& m : j.at("methods")) {
      report.methods.push_back(FromJson(m));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorrupt, std::string("run report: ") + e.what());
  }
  return report;
}

void WriteRunReport(const RunReport& report, const std::filesystem::path& path) {
  io::WriteText(path, RunReportToJson(report));
}

RunReport ReadRunReport(const std::filesystem::path& path) {
  return RunReportFromJson(io::ReadText(path));
}

std::string RocCsv(std::span<const RocPoint> roc) {
  std::string text = "fpr,tpr\n";
  for (const RocPoint& p : roc) {
    text += io::FormatDouble(p.fpr) + "," + io::FormatDouble(p.tpr) + "\n";
  }
  return text;
}

void WriteRocCsv(std::span<const RocPoint> roc,
                 const std::filesystem::path& path) {
  io::WriteText(path, RocCsv(roc));
}

std::string RocSvg(std::span<const EvalReport> reports) {
  constexpr double kSize = 480.0;
  constexpr double kMargin = 60.0;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
                                     "#17becf"};
  const double decades = -std::log10(kSvgAxisMin);
  auto x = [&](double fpr) {
    const double v = std::log10(std::max(fpr, kSvgAxisMin));
    return kMargin + (v + decades) / decades * kSize;
  };
  auto y = [&](double tpr) {
    const double v = std::log10(std::max(tpr, kSvgAxisMin));
    return kMargin + kSize - (v + decades) / decades * kSize;
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream svg;
  const double total = kSize + 2 * kMargin;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total + 160
      << "\" height=\"" << total << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kSize << "\" height=\"" << kSize
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = 0; d <= static_cast<int>(decades); ++d) {
    const double v = std::pow(10.0, -d);
    char label[16];
    std::snprintf(label, sizeof(label), "1e-%d", d);
    const std::string text = d == 0 ? "1" : label;
    svg << "<line x1=\"" << num(x(v)) << "\" y1=\"" << kMargin + kSize
        << "\" x2=\"" << num(x(v)) << "\" y2=\"" << kMargin
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<line x1=\"" << kMargin << "\" y1=\"" << num(y(v)) << "\" x2=\""
        << kMargin + kSize << "\" y2=\"" << num(y(v))
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(x(v)) << "\" y=\"" << kMargin + kSize + 16
        << "\" text-anchor=\"middle\">" << text << "</text>\n";
    svg << "<text x=\"" << kMargin - 6 << "\" y=\"" << num(y(v) + 4)
        << "\" text-anchor=\"end\">" << text << "</text>\n";
  }
  svg << "<line x1=\"" << num(x(kLowFpr)) << "\" y1=\"" << kMargin + kSize
      << "\" x2=\"" << num(x(kLowFpr)) << "\" y2=\"" << kMargin
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  svg << "<line x1=\"" << num(x(kSvgAxisMin)) << "\" y1=\""
      << num(y(kSvgAxisMin)) << "\" x2=\"" << num(x(1.0)) << "\" y2=\""
      << num(y(1.0)) << "\" stroke=\"#999\"/>\n";
  svg << "<text x=\"" << kMargin + kSize / 2 << "\" y=\"" << total - 16
      << "\" text-anchor=\"middle\">False positive rate</text>\n";
  svg << "<text transform=\"rotate(-90)\" x=\"" << -(kMargin + kSize / 2)
      << "\" y=\"18\" text-anchor=\"middle\">True positive rate</text>\n";

  for (size_t m = 0; m < reports.size(); ++m) {
    const char* color = kColors[m % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    // Step curve: tpr holds until the next point's fpr.
    const std::vector<RocPoint>& roc = reports[m].roc;
    for (size_t i = 0; i < roc.size(); ++i) {
      if (i > 0) {
        svg << num(x(roc[i].fpr)) << "," << num(y(roc[i - 1].tpr)) << " ";
      }
      svg << num(x(roc[i].fpr)) << "," << num(y(roc[i].tpr)) << " ";
    }
    svg << "\"/>\n";
    const double ly = kMargin + 14.0 * static_cast<double>(m + 1);
    svg << "<line x1=\"" << total + 4 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << total + 24 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\"/>\n";
    svg << "<text x=\"" << total + 28 << "\" y=\"" << ly << "\">"
        << reports[m].method << " (AUC " << num(reports[m].auc)
        << ")</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void WriteRocSvg(std::span<const EvalReport> reports,
                 const std::filesystem::path& path) {
  io::WriteText(path, RocSvg(reports));
}

void WriteScoresCsv(std::span<const uint64_t> ids, std::span<const double> scores,
                    std::span<const int> labels,
                    const std::filesystem::path& path) {
  Require(ids.size() == scores.size() && labels.size() == scores.size(),
          "score table columns differ in length");
  std::string text = "id,score,member\n";
  for (size_t i = 0; i < ids.size(); ++i) {
    text += std::to_string(ids[i]) + "," + io::FormatDouble(scores[i]) + "," +
            (labels[i] < 0 ? std::string("NA") : std::to_string(labels[i])) +
            "\n";
  }
  io::WriteText(path, text);
}

ScoreTable ReadScoresCsv(const std::filesystem::path& path) {
  std::istringstream in(io::ReadText(path));
  std::string line;
  if (!std::getline(in, line) || line != "id,score,member") {
    Fail(ErrorCode::kCorrupt, path.string() + ": bad header");
  }
  ScoreTable table;
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const size_t a = line.find(',');
    const size_t b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      Fail(ErrorCode::kCorrupt, path.string() + ": row " + std::to_string(row));
    }
    uint64_t id = 0;
    double score = 0.0;
    const char* s = line.data();
    const auto r1 = std::from_chars(s, s + a, id);
    const auto r2 = std::from_chars(s + a + 1, s + b, score);
    if (r1.ec != std::errc() || r1.ptr != s + a || r2.ec != std::errc() ||
        r2.ptr != s + b) {
      Fail(ErrorCode::kCorrupt, path.string() + ": row " + std::to_string(row));
    }
    const std::string member = line.substr(b + 1);
    int label = -1;
    if (member == "1") {
      label = 1;
    } else if (member == "0") {
      label = 0;
    } else if (member != "NA") {
      Fail(ErrorCode::kCorrupt, path.string() + ": row " + std::to_string(row) +
                                    ": member must be 0, 1 or NA");
    }
    table.ids.push_back(id);
    table.scores.push_back(score);
    table.labels.push_back(label);
  }
  return table;
}

}  // namespace trajmia::metrics
