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

#include "trajmia/cli/commands.h"

#include <spdlog/spdlog.h>

#include <atomic>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <thread>

#include "trajmia/attack/pipeline.h"
#include "trajmia/cli/manifest.h"
#include "trajmia/io.h"

namespace trajmia::cli {
namespace {

namespace fs = std::filesystem;
using attack::ExperimentConfig;
using attack::Pipeline;
using attack::Stage;
using nlohmann::ordered_json;

std::vector<std::string> StepArtifacts(const std::string& step) {
  if (const auto stage = attack::ParseStage(step)) {
    return attack::StageOutputs(*stage);
  }
  return {attack::ScoresFile(step.substr(std::string("baseline:").size()))};
}

bool StepOutputsPresent(const Pipeline& pipeline, const std::string& step) {
  if (const auto stage = attack::ParseStage(step)) {
    return pipeline.OutputsPresent(*stage);
  }
  const auto kind =
      baselines::ParseKind(step.substr(std::string("baseline:").size()));
  return kind && pipeline.OutputsPresent(*kind);
}

// Runs the whole pipeline in `dir`, skipping steps the manifest records as
// done under the same config digest. Once any step runs, every later step
// runs too.
metrics::RunReport RunWithManifest(const ExperimentConfig& cfg,
                                   const fs::path& dir, int jobs) {
  fs::create_directories(dir);
  const Pipeline probe(cfg, dir);
  RunManifest manifest = LoadManifest(dir);
  manifest.SetDigest(probe.digest());
  SaveManifest(manifest, dir);

  std::mutex mu;
  std::atomic<bool> ran{false};
  attack::RunHooks hooks;
  hooks.skip = [&](const std::string& step) {
    std::lock_guard<std::mutex> lock(mu);
    const bool skip = !ran && manifest.IsDone(step) &&
                      StepOutputsPresent(probe, step);
    if (skip) spdlog::info("[{}] {}: up to date, skipped", dir.string(), step);
    return skip;
  };
  hooks.before = [&](const std::string& step) {
    ran = true;
    std::lock_guard<std::mutex> lock(mu);
    spdlog::info("[{}] {}: running", dir.string(), step);
    manifest.MarkStarted(step);
    SaveManifest(manifest, dir);
  };
  hooks.after = [&](const std::string& step, bool ok) {
    std::lock_guard<std::mutex> lock(mu);
    manifest.MarkFinished(step, ok, StepArtifacts(step));
    SaveManifest(manifest, dir);
    if (ok) {
      spdlog::info("[{}] {}: done", dir.string(), step);
    } else {
      spdlog::error("[{}] {}: failed", dir.string(), step);
    }
  };
  return attack::RunPipeline(cfg, dir, nullptr, jobs, hooks);
}

std::string Percent(double fpr) {
  return io::FormatDouble(fpr * 100.0) + "pct";
}

void PrintSummary(const metrics::RunReport& report, OutputFormat format,
                  std::ostream& out) {
  if (format == OutputFormat::kCsv) {
    out << "method,auc,balanced_accuracy";
    for (double fpr : metrics::kReportFprs) out << ",tpr_at_" << Percent(fpr);
    out << "\n";
    for (const metrics::EvalReport& m : report.methods) {
      out << m.method << "," << io::FormatDouble(m.auc) << ","
          << io::FormatDouble(m.balanced_accuracy.value);
      for (const auto& t : m.tpr_at_fpr) out << "," << io::FormatDouble(t.tpr);
      out << "\n";
    }
    return;
  }
  ordered_json methods = ordered_json::array();
  for (const metrics::EvalReport& m : report.methods) {
    ordered_json tpr = ordered_json::object();
    for (const auto& t : m.tpr_at_fpr) tpr[io::FormatDouble(t.fpr)] = t.tpr;
    methods.push_back({{"method", m.method},
                       {"auc", m.auc},
                       {"balanced_accuracy", m.balanced_accuracy.value},
                       {"tpr_at_fpr", std::move(tpr)}});
  }
  ordered_json stats = ordered_json::object();
  for (const auto& [k, v] : report.stats) stats[k] = v;
  out << ordered_json{{"seed", report.seed},
                      {"config_digest", report.config_digest},
                      {"stats", std::move(stats)},
                      {"methods", std::move(methods)}}
             .dump(2)
      << "\n";
}

template <typename Body>
int Guarded(const char* command, Body body) {
  try {
    return body();
  } catch (const Error& e) {
    spdlog::error("{}: {}", command, e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", command, e.what());
    return kExitFailure;
  }
}

ExperimentConfig LoadRunConfig(const fs::path& path,
                               const std::optional<uint64_t>& seed,
                               const std::optional<std::vector<std::string>>& bl) {
  ExperimentConfig cfg = attack::LoadConfig(path);
  if (seed) cfg.seed = *seed;
  if (bl) {
    std::string joined;
    for (size_t i = 0; i < bl->size(); ++i) joined += (i ? "," : "") + (*bl)[i];
    attack::SetConfigValue(cfg, "baselines", joined);
  }
  attack::ValidateConfig(cfg);
  return cfg;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
      return kExitConfig;
    case ErrorCode::kMissingArtifact:
      return kExitMissingArtifact;
    case ErrorCode::kNumerical:
      return kExitNumerical;
    case ErrorCode::kCorrupt:
    case ErrorCode::kInternal:
      return kExitFailure;
  }
  return kExitFailure;
}

int CmdRun(const RunOptions& options, std::ostream& out) {
  return Guarded("run", [&] {
    const ExperimentConfig cfg =
        LoadRunConfig(options.config, options.seed, options.baselines);
    const metrics::RunReport report =
        RunWithManifest(cfg, options.out, options.jobs);
    PrintSummary(report, options.format, out);
    return kExitOk;
  });
}

int CmdStage(const StageOptions& options, std::ostream& out) {
  return Guarded("stage", [&] {
    const std::string& step = options.stage;
    std::optional<Stage> stage = attack::ParseStage(step);
    std::optional<baselines::Kind> kind;
    const std::string prefix = "baseline:";
    if (!stage && step.rfind(prefix, 0) == 0) {
      kind = baselines::ParseKind(step.substr(prefix.size()));
    }
    if (!stage && !kind) {
      Fail(ErrorCode::kParse, "unknown stage '" + step + "'");
    }
    const ExperimentConfig cfg =
        attack::LoadConfig(options.out / attack::artifacts::kConfig);
    Pipeline pipeline(cfg, options.out);
    RunManifest manifest = LoadManifest(options.out);
    manifest.SetDigest(pipeline.digest());
    manifest.MarkStarted(step);
    SaveManifest(manifest, options.out);
    bool ok = false;
    try {
      if (stage) {
        pipeline.Run(*stage);
      } else {
        pipeline.RunBaseline(*kind);
      }
      ok = true;
    } catch (...) {
      manifest.MarkFinished(step, false, {});
      SaveManifest(manifest, options.out);
      throw;
    }
    manifest.MarkFinished(step, ok, StepArtifacts(step));
    // Anything downstream of a re-run step is stale.
    std::vector<std::string> downstream;
    bool after = false;
    for (Stage s : attack::kAllStages) {
      if (after) downstream.push_back(attack::StageName(s));
      if (stage && s == *stage) after = true;
    }
    if (stage && *stage <= Stage::kTrainAttack) {
      for (baselines::Kind k : baselines::kAllKinds) {
        downstream.push_back(attack::BaselineStep(k));
      }
    }
    if (kind) downstream.push_back(attack::StageName(Stage::kEvaluate));
    manifest.Invalidate(downstream);
    SaveManifest(manifest, options.out);
    if (options.format == OutputFormat::kJson) {
      out << ordered_json{{"stage", step}, {"status", "done"}}.dump() << "\n";
    } else {
      out << "stage,status\n" << step << ",done\n";
    }
    return kExitOk;
  });
}

std::vector<std::string> AxisKeys(const std::string& axis) {
  if (axis == "train_size") {
    return {"split.target_train", "split.target_test", "split.shadow_train",
            "split.shadow_test"};
  }
  if (axis == "distill_size") return {"split.distill_cap"};
  if (axis == "distill_epochs") return {"distill.epochs"};
  if (axis == "dp_noise") return {"dp.noise_multiplier"};
  if (attack::IsConfigKey(axis)) return {axis};
  Fail(ErrorCode::kParse, "unknown sweep axis '" + axis + "'");
}

void ApplyAxis(ExperimentConfig& cfg, const std::string& axis,
               const std::string& value) {
  for (const std::string& key : AxisKeys(axis)) {
    attack::SetConfigValue(cfg, key, value);
  }
  if (axis == "dp_noise") cfg.dp_enabled = true;
}

int CmdSweep(const SweepOptions& options, std::ostream& out) {
  return Guarded("sweep", [&] {
    AxisKeys(options.axis);
    if (options.values.empty()) Fail(ErrorCode::kParse, "sweep needs --values");
    const ExperimentConfig base =
        LoadRunConfig(options.config, std::nullopt, options.baselines);
    const std::vector<uint64_t> seeds =
        options.seeds.empty() ? std::vector<uint64_t>{base.seed} : options.seeds;

    struct Point {
      std::string value;
      uint64_t seed;
      ExperimentConfig cfg;
      fs::path dir;
      metrics::RunReport report;
    };
    std::vector<Point> points;
    for (const std::string& value : options.values) {
      for (uint64_t seed : seeds) {
        Point p{value, seed, base, {}, {}};
        ApplyAxis(p.cfg, options.axis, value);
        p.cfg.seed = seed;
        attack::ValidateConfig(p.cfg);
        p.dir = options.out / (options.axis + "=" + value) /
                ("seed=" + std::to_string(seed));
        points.push_back(std::move(p));
      }
    }

    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next++; i < points.size(); i = next++) {
        try {
          points[i].report = RunWithManifest(points[i].cfg, points[i].dir, 1);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const int jobs = std::max(1, std::min<int>(options.jobs,
                                               static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    std::vector<std::string> methods;
    for (const auto& m : points.front().report.methods) methods.push_back(m.method);
    std::string csv = "axis,value,seed,train_accuracy,test_accuracy,gap";
    for (const std::string& m : methods) {
      csv += "," + m + "_auc," + m + "_balanced_accuracy";
      for (double fpr : metrics::kReportFprs) {
        csv += "," + m + "_tpr_at_" + Percent(fpr);
      }
    }
    csv += "\n";
    ordered_json rows = ordered_json::array();
    for (const Point& p : points) {
      const metrics::RunReport& r = p.report;
      csv += options.axis + "," + p.value + "," + std::to_string(p.seed) + "," +
             io::FormatDouble(r.Stat("target_train_accuracy")) + "," +
             io::FormatDouble(r.Stat("target_test_accuracy")) + "," +
             io::FormatDouble(r.Stat("target_gap"));
      ordered_json row = {{"axis", options.axis},
                          {"value", p.value},
                          {"seed", p.seed},
                          {"train_accuracy", r.Stat("target_train_accuracy")},
                          {"test_accuracy", r.Stat("target_test_accuracy")},
                          {"gap", r.Stat("target_gap")}};
      for (const std::string& m : methods) {
        const metrics::EvalReport* e = r.Find(m);
        if (e == nullptr) Fail(ErrorCode::kInternal, "missing method " + m);
        csv += "," + io::FormatDouble(e->auc) + "," +
               io::FormatDouble(e->balanced_accuracy.value);
        row[m + "_auc"] = e->auc;
        row[m + "_balanced_accuracy"] = e->balanced_accuracy.value;
        for (const auto& t : e->tpr_at_fpr) {
          csv += "," + io::FormatDouble(t.tpr);
          row[m + "_tpr_at_" + Percent(t.fpr)] = t.tpr;
        }
      }
      csv += "\n";
      rows.push_back(std::move(row));
    }
    io::WriteText(options.out / "summary.csv", csv);
    io::WriteText(options.out / "summary.json", rows.dump(2) + "\n");
    out << (options.format == OutputFormat::kCsv ? csv : rows.dump(2) + "\n");
    return kExitOk;
  });
}

}  // namespace trajmia::cli
