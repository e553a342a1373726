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

#include "trajmia/attack/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <json.hpp>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "trajmia/distill/distill.h"
#include "trajmia/io.h"
#include "trajmia/nn/serialize.h"
#include "trajmia/nn/train.h"
#include "trajmia/trajectory/trajectory.h"

namespace trajmia::attack {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using baselines::Kind;

ordered_json ReadJson(const fs::path& path) {
  const std::string text = io::ReadText(path);
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) Fail(ErrorCode::kCorrupt, path.string() + ": invalid JSON");
  return j;
}

void WriteJson(const fs::path& path, const ordered_json& j) {
  io::WriteText(path, j.dump(2) + "\n");
}

double JsonNumber(const ordered_json& j, const char* key, const fs::path& path) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    Fail(ErrorCode::kCorrupt, path.string() + ": missing number '" + key + "'");
  }
  return j.at(key).get<double>();
}

std::string StatsPath(const char* distill_dir) {
  return std::string(distill_dir) + "/fidelity.json";
}

// Target-side records (train file then test file) merged into one set.
trajectory::TrajectorySet Concat(const trajectory::TrajectorySet& a,
                                 const trajectory::TrajectorySet& b) {
  if (a.n != b.n) {
    Fail(ErrorCode::kCorrupt, "target trajectory files disagree in N");
  }
  trajectory::TrajectorySet out = a;
  out.records.insert(out.records.end(), b.records.begin(), b.records.end());
  return out;
}

data::FeatureDataset Concat(const data::FeatureDataset& a,
                            const data::FeatureDataset& b) {
  data::FeatureDataset out;
  out.class_count = std::max(a.class_count, b.class_count);
  out.features.resize(static_cast<Eigen::Index>(a.size() + b.size()), a.dim());
  out.features << a.features, b.features;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.ids = a.ids;
  out.ids.insert(out.ids.end(), b.ids.begin(), b.ids.end());
  return out;
}

std::vector<double> OriginalLosses(const trajectory::TrajectorySet& set) {
  std::vector<double> losses;
  losses.reserve(set.size());
  for (const auto& r : set.records) losses.push_back(r.original_loss());
  return losses;
}

std::vector<uint64_t> Ids(const trajectory::TrajectorySet& set) {
  std::vector<uint64_t> ids;
  ids.reserve(set.size());
  for (const auto& r : set.records) ids.push_back(r.id);
  return ids;
}

// Re-throws with the step name prefixed, keeping the error class.
[[noreturn]] void RethrowInStep(const std::string& step) {
  try {
    throw;
  } catch (const Error& e) {
    Fail(e.code(), "stage " + step + ": " + e.what());
  } catch (const std::exception& e) {
    Fail(ErrorCode::kInternal, "stage " + step + ": " + e.what());
  }
}

}  // namespace

const char* StageName(Stage stage) {
  switch (stage) {
    case Stage::kTrainTarget: return "train-target";
    case Stage::kTrainShadow: return "train-shadow";
    case Stage::kDistillTarget: return "distill-target";
    case Stage::kDistillShadow: return "distill-shadow";
    case Stage::kTrajectories: return "trajectories";
    case Stage::kTrainAttack: return "train-attack";
    case Stage::kEvaluate: return "evaluate";
  }
  return "unknown";
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (name == StageName(s)) return s;
  }
  return std::nullopt;
}

std::string BaselineStep(Kind kind) {
  return std::string("baseline:") + baselines::KindName(kind);
}

std::string ScoresFile(std::string_view method) {
  return "scores_" + std::string(method) + ".csv";
}

std::vector<std::string> StageInputs(Stage stage) {
  using namespace artifacts;
  switch (stage) {
    case Stage::kTrainTarget:
    case Stage::kTrainShadow:
      return {};
    case Stage::kDistillTarget:
      return {kTargetModel};
    case Stage::kDistillShadow:
      return {kShadowModel};
    case Stage::kTrajectories:
      return {kTargetModel, kShadowModel,
              std::string(kDistillTarget) + "/meta.json",
              std::string(kDistillShadow) + "/meta.json"};
    case Stage::kTrainAttack:
      return {kShadowMembers, kShadowNonmembers};
    case Stage::kEvaluate:
      return {kAttackModel, kTargetTrain, kTargetTest, kTargetStats,
              kShadowStats, StatsPath(kDistillTarget),
              StatsPath(kDistillShadow)};
  }
  return {};
}

std::vector<std::string> StageOutputs(Stage stage) {
  using namespace artifacts;
  switch (stage) {
    case Stage::kTrainTarget:
      return {kTargetModel, kTargetStats};
    case Stage::kTrainShadow:
      return {kShadowModel, kShadowStats};
    case Stage::kDistillTarget:
      return {std::string(kDistillTarget) + "/meta.json",
              StatsPath(kDistillTarget)};
    case Stage::kDistillShadow:
      return {std::string(kDistillShadow) + "/meta.json",
              StatsPath(kDistillShadow)};
    case Stage::kTrajectories:
      return {kShadowMembers, kShadowNonmembers, kTargetTrain, kTargetTest};
    case Stage::kTrainAttack:
      return {kAttackModel};
    case Stage::kEvaluate:
      return {kReport, kRocCsv, kRocSvg, ScoresFile(kOursMethod)};
  }
  return {};
}

data::FeatureDataset LoadExperimentData(const ExperimentConfig& cfg) {
  data::FeatureDataset data;
  switch (cfg.source) {
    case DataSource::kSynth: {
      data::SynthSpec spec = cfg.synth;
      spec.seed = StageSeed(cfg, "data");
      data = data::SynthGenerate(spec);
      break;
    }
    case DataSource::kCsv:
      data = data::LoadCsv(cfg.data_path, cfg.label_column);
      break;
    case DataSource::kBinary:
      data = data::LoadBinary(cfg.data_path);
      break;
  }
  if (cfg.min_max_scale) data::MinMaxScale(data);
  return data;
}

Pipeline::Pipeline(ExperimentConfig cfg, fs::path dir,
                   std::shared_ptr<const data::FeatureDataset> data)
    : cfg_(std::move(cfg)), dir_(std::move(dir)), data_(std::move(data)) {
  ValidateConfig(cfg_);
  digest_ = ConfigDigest(cfg_);
}

void Pipeline::WriteConfig() const {
  io::WriteText(Path(artifacts::kConfig), ConfigJson(cfg_));
}

bool Pipeline::KeepShadowEpochs() const {
  return std::find(cfg_.baselines.begin(), cfg_.baselines.end(),
                   baselines::KindName(Kind::kActualShadowTrajectory)) !=
         cfg_.baselines.end();
}

const data::DataSplit& Pipeline::Split() const {
  std::call_once(split_once_, [this] {
    if (!data_) {
      data_ = std::make_shared<const data::FeatureDataset>(
          LoadExperimentData(cfg_));
    }
    data::SplitSpec spec = cfg_.split;
    spec.seed = StageSeed(cfg_, "split");
    split_ = std::make_unique<data::DataSplit>(data::Split(*data_, spec));
  });
  return *split_;
}

void Pipeline::CheckInputs(Stage stage) const {
  for (const std::string& input : StageInputs(stage)) {
    if (!fs::exists(Path(input))) {
      Fail(ErrorCode::kMissingArtifact,
           std::string(StageName(stage)) + " needs " + Path(input).string());
    }
  }
}

void Pipeline::CheckInputs(Kind kind) const {
  for (const std::string& input : baselines::RequiredArtifacts(kind)) {
    if (!fs::exists(Path(input))) {
      Fail(ErrorCode::kMissingArtifact,
           BaselineStep(kind) + " needs " + Path(input).string());
    }
  }
}

bool Pipeline::OutputsPresent(Stage stage) const {
  for (const std::string& output : StageOutputs(stage)) {
    if (!fs::exists(Path(output))) return false;
  }
  return true;
}

bool Pipeline::OutputsPresent(Kind kind) const {
  return fs::exists(Path(ScoresFile(baselines::KindName(kind))));
}

void Pipeline::Run(Stage stage) {
  try {
    CheckInputs(stage);
    switch (stage) {
      case Stage::kTrainTarget: TrainTarget(); break;
      case Stage::kTrainShadow: TrainShadow(); break;
      case Stage::kDistillTarget: DistillRole(true); break;
      case Stage::kDistillShadow: DistillRole(false); break;
      case Stage::kTrajectories: BuildTrajectories(); break;
      case Stage::kTrainAttack: TrainAttackStage(); break;
      case Stage::kEvaluate: EvaluateStage(); break;
    }
  } catch (...) {
    RethrowInStep(StageName(stage));
  }
}

void Pipeline::TrainTarget() {
  const data::DataSplit& split = Split();
  const data::FeatureDataset& train = split.target_train;
  const std::vector<int> dims =
      TargetDims(cfg_, train.dim(), train.class_count);
  nn::MlpModel model = nn::MakeMlp(dims, *cfg_.target.activation,
                                   StageSeed(cfg_, "target/init"));
  nn::TrainConfig tc = cfg_.target_train;
  tc.seed = StageSeed(cfg_, "target/train");
  tc.snapshot_every = 0;
  nn::TrainResult result = cfg_.dp_enabled
                               ? nn::TrainDpSgd(std::move(model), train, tc, cfg_.dp)
                               : nn::Train(std::move(model), train, tc);
  const double train_acc = nn::Accuracy(result.model, train);
  const double test_acc = nn::Accuracy(result.model, split.target_test);
  nn::SaveModel(result.model, Path(artifacts::kTargetModel));
  WriteJson(Path(artifacts::kTargetStats),
            {{"train_accuracy", train_acc},
             {"test_accuracy", test_acc},
             {"final_train_loss", result.epoch_loss.back()}});
}

void Pipeline::TrainShadow() {
  const data::DataSplit& split = Split();
  const data::FeatureDataset& train = split.shadow_train;
  const std::vector<int> dims =
      ShadowDims(cfg_, train.dim(), train.class_count);
  nn::MlpModel model = nn::MakeMlp(dims, ShadowActivation(cfg_),
                                   StageSeed(cfg_, "shadow/init"));
  nn::TrainConfig tc = cfg_.target_train;
  tc.seed = StageSeed(cfg_, "shadow/train");
  tc.snapshot_every = KeepShadowEpochs() ? 1 : 0;
  nn::TrainResult result = nn::Train(std::move(model), train, tc);
  if (KeepShadowEpochs()) {
    distill::SnapshotSeries series;
    series.snapshots = std::move(result.snapshots);
    series.teacher_tag = "shadow-training";
    series.config_digest = io::HexDigest(nn::CanonicalString(tc));
    series.seed = tc.seed;
    distill::SaveSeries(series, Path(artifacts::kShadowEpochs));
  }
  const double train_acc = nn::Accuracy(result.model, train);
  const double test_acc = nn::Accuracy(result.model, split.shadow_test);
  nn::SaveModel(result.model, Path(artifacts::kShadowModel));
  WriteJson(Path(artifacts::kShadowStats),
            {{"train_accuracy", train_acc},
             {"test_accuracy", test_acc},
             {"final_train_loss", result.epoch_loss.back()}});
}

void Pipeline::DistillRole(bool target) {
  const data::DataSplit& split = Split();
  const nn::MlpModel teacher = nn::LoadModel(
      Path(target ? artifacts::kTargetModel : artifacts::kShadowModel));
  // The teacher is reachable only through posterior queries.
  distill::ModelOracle oracle(teacher, target ? "target" : "shadow");
  const data::FeatureDataset& d_k = split.distill;
  nn::MlpModel student =
      nn::MakeMlp(StudentDims(cfg_, d_k.dim(), d_k.class_count),
                  StudentActivation(cfg_), StageSeed(cfg_, "distill/init"));
  nn::TrainConfig tc = cfg_.distill_train;
  tc.seed = StageSeed(cfg_, "distill/train");
  tc.snapshot_every = 1;
  distill::DistillResult result =
      distill::Distill(oracle, std::move(student), d_k, tc);
  const char* dir = target ? artifacts::kDistillTarget : artifacts::kDistillShadow;
  distill::SaveSeries(result.series, Path(dir));
  WriteJson(Path(StatsPath(dir)),
            {{"final_kl", result.epoch_kl.back()},
             {"agreement", distill::Agreement(result.student, teacher, d_k)},
             {"queries", oracle.query_count()},
             {"epoch_kl", result.epoch_kl}});
}

void Pipeline::BuildTrajectories() {
  const data::DataSplit& split = Split();
  const distill::SnapshotSeries shadow_series =
      distill::LoadSeries(Path(artifacts::kDistillShadow));
  const distill::SnapshotSeries target_series =
      distill::LoadSeries(Path(artifacts::kDistillTarget));
  if (shadow_series.length() != target_series.length()) {
    Fail(ErrorCode::kCorrupt, "target and shadow distillations differ in N");
  }
  const nn::MlpModel shadow = nn::LoadModel(Path(artifacts::kShadowModel));
  distill::ModelOracle target(nn::LoadModel(Path(artifacts::kTargetModel)),
                              "target");

  trajectory::SaveCsv(trajectory::Extract(shadow_series, shadow, split.shadow_train,
                                          1, "distill_shadow"),
                      Path(artifacts::kShadowMembers));
  trajectory::SaveCsv(trajectory::Extract(shadow_series, shadow, split.shadow_test,
                                          0, "distill_shadow"),
                      Path(artifacts::kShadowNonmembers));
  // Target-side membership stays unknown here; it enters only at evaluation.
  trajectory::SaveCsv(trajectory::Extract(target_series, target, split.target_train,
                                          std::nullopt, "distill_target"),
                      Path(artifacts::kTargetTrain));
  trajectory::SaveCsv(trajectory::Extract(target_series, target, split.target_test,
                                          std::nullopt, "distill_target"),
                      Path(artifacts::kTargetTest));
}

void Pipeline::TrainAttackStage() {
  const trajectory::TrajectorySet members =
      trajectory::LoadCsv(Path(artifacts::kShadowMembers));
  const trajectory::TrajectorySet nonmembers =
      trajectory::LoadCsv(Path(artifacts::kShadowNonmembers));
  AttackSpec spec = cfg_.attack;
  spec.train.seed = StageSeed(cfg_, "attack");
  spec.columns.clear();
  attack::SaveAttack(TrainAttack(members, nonmembers, spec),
                     Path(artifacts::kAttackModel));
}

void Pipeline::EvaluateStage() {
  const data::DataSplit& split = Split();
  const trajectory::TrajectorySet targets =
      Concat(trajectory::LoadCsv(Path(artifacts::kTargetTrain)),
             trajectory::LoadCsv(Path(artifacts::kTargetTest)));
  const std::unordered_set<uint64_t> members(split.target_train.ids.begin(),
                                             split.target_train.ids.end());
  std::vector<int> labels;
  for (const auto& r : targets.records) labels.push_back(members.count(r.id) ? 1 : 0);
  const std::vector<uint64_t> ids = Ids(targets);
  const std::vector<double> losses = OriginalLosses(targets);

  const AttackModel model = LoadAttack(Path(artifacts::kAttackModel));
  metrics::WriteScoresCsv(ids, Score(model, targets), labels,
                          Path(ScoresFile(kOursMethod)));

  metrics::RunReport report;
  report.seed = cfg_.seed;
  report.config_digest = digest_;

  std::vector<std::string> methods = {kOursMethod};
  methods.insert(methods.end(), cfg_.baselines.begin(), cfg_.baselines.end());
  for (const std::string& method : methods) {
    const fs::path path = Path(ScoresFile(method));
    if (!fs::exists(path)) {
      Fail(ErrorCode::kMissingArtifact, "evaluate needs " + path.string());
    }
    metrics::ScoreTable table = metrics::ReadScoresCsv(path);
    if (table.ids != ids) {
      Fail(ErrorCode::kCorrupt,
           path.string() + " does not cover the target-side samples in order");
    }
    report.methods.push_back(metrics::Evaluate(method, ids, table.scores, labels,
                                               losses, cfg_.seed, digest_));
  }

  const auto target_stats = ReadJson(Path(artifacts::kTargetStats));
  const auto shadow_stats = ReadJson(Path(artifacts::kShadowStats));
  const auto kt = ReadJson(Path(StatsPath(artifacts::kDistillTarget)));
  const auto ks = ReadJson(Path(StatsPath(artifacts::kDistillShadow)));
  auto stat = [&](const char* name, const ordered_json& j, const char* key,
                  const char* file) {
    report.stats.emplace_back(name, JsonNumber(j, key, Path(file)));
  };
  stat("target_train_accuracy", target_stats, "train_accuracy",
       artifacts::kTargetStats);
  stat("target_test_accuracy", target_stats, "test_accuracy",
       artifacts::kTargetStats);
  report.stats.emplace_back("target_gap", report.stats[0].second -
                                              report.stats[1].second);
  stat("shadow_train_accuracy", shadow_stats, "train_accuracy",
       artifacts::kShadowStats);
  stat("shadow_test_accuracy", shadow_stats, "test_accuracy",
       artifacts::kShadowStats);
  const std::string kt_path = StatsPath(artifacts::kDistillTarget);
  const std::string ks_path = StatsPath(artifacts::kDistillShadow);
  stat("distill_target_kl", kt, "final_kl", kt_path.c_str());
  stat("distill_target_agreement", kt, "agreement", kt_path.c_str());
  stat("distill_shadow_kl", ks, "final_kl", ks_path.c_str());
  stat("distill_shadow_agreement", ks, "agreement", ks_path.c_str());
  report.stats.emplace_back("distill_epochs", static_cast<double>(targets.n));

  metrics::WriteRunReport(report, Path(artifacts::kReport));
  metrics::WriteRocCsv(report.methods.front().roc, Path(artifacts::kRocCsv));
  metrics::WriteRocSvg(report.methods, Path(artifacts::kRocSvg));
}

void Pipeline::RunBaseline(Kind kind) {
  const std::string step = BaselineStep(kind);
  try {
    CheckInputs(kind);
    const data::DataSplit& split = Split();
    const data::FeatureDataset target_samples =
        Concat(split.target_train, split.target_test);
    std::vector<int> labels(target_samples.size(), 0);
    std::fill(labels.begin(), labels.begin() + split.target_train.size(), 1);

    std::vector<double> scores;
    auto target_set = [&] {
      trajectory::TrajectorySet set =
          Concat(trajectory::LoadCsv(Path(artifacts::kTargetTrain)),
                 trajectory::LoadCsv(Path(artifacts::kTargetTest)));
      if (Ids(set) != target_samples.ids) {
        Fail(ErrorCode::kCorrupt,
             "target trajectories do not match the target-side samples");
      }
      return set;
    };
    auto target_posteriors = [&] {
      distill::ModelOracle oracle(nn::LoadModel(Path(artifacts::kTargetModel)),
                                  "target");
      return oracle.Query(target_samples.features);
    };
    AttackSpec spec = cfg_.attack;
    spec.train.seed = StageSeed(cfg_, "attack");

    switch (kind) {
      case Kind::kYeomLoss:
        scores = baselines::YeomScores(OriginalLosses(target_set()));
        break;
      case Kind::kSalemPosterior: {
        const nn::MlpModel shadow = nn::LoadModel(Path(artifacts::kShadowModel));
        baselines::SalemSpec salem;
        salem.train = cfg_.attack.train;
        salem.train.seed = StageSeed(cfg_, "baseline/salem");
        scores = baselines::SalemScores(
            nn::Posteriors(shadow, split.shadow_train.features),
            nn::Posteriors(shadow, split.shadow_test.features),
            target_posteriors(), salem);
        break;
      }
      case Kind::kSongMetric: {
        const nn::MlpModel shadow = nn::LoadModel(Path(artifacts::kShadowModel));
        const baselines::SongThresholds thresholds = baselines::FitSongThresholds(
            nn::Posteriors(shadow, split.shadow_train.features),
            split.shadow_train.labels,
            nn::Posteriors(shadow, split.shadow_test.features),
            split.shadow_test.labels);
        scores = baselines::SongScores(thresholds, target_posteriors(),
                                       target_samples.labels);
        break;
      }
      case Kind::kWatsonCalibrated: {
        const nn::MlpModel shadow = nn::LoadModel(Path(artifacts::kShadowModel));
        const std::vector<double> reference = trajectory::ClampedLosses(
            nn::Posteriors(shadow, target_samples.features), target_samples.labels);
        scores = baselines::WatsonScores(OriginalLosses(target_set()), reference);
        break;
      }
      case Kind::kLoss1:
      case Kind::kLoss1PlusLossT:
      case Kind::kLossN:
        scores = baselines::VariantScores(
            kind, trajectory::LoadCsv(Path(artifacts::kShadowMembers)),
            trajectory::LoadCsv(Path(artifacts::kShadowNonmembers)), target_set(),
            spec);
        break;
      case Kind::kActualShadowTrajectory: {
        const trajectory::TrajectorySet targets = target_set();
        const distill::SnapshotSeries epochs =
            distill::LoadSeries(Path(artifacts::kShadowEpochs));
        distill::SnapshotSeries picked;
        picked.teacher_tag = epochs.teacher_tag;
        int next = 1;
        for (int e : baselines::ActualTrajectoryEpochs(epochs.length(), targets.n)) {
          picked.snapshots.push_back({next++, epochs.at_epoch(e)});
        }
        const nn::MlpModel shadow = nn::LoadModel(Path(artifacts::kShadowModel));
        scores = baselines::VariantScores(
            kind,
            trajectory::Extract(picked, shadow, split.shadow_train, 1,
                                "shadow_training"),
            trajectory::Extract(picked, shadow, split.shadow_test, 0,
                                "shadow_training"),
            targets, spec);
        break;
      }
    }
    metrics::WriteScoresCsv(target_samples.ids, scores, labels,
                            Path(ScoresFile(baselines::KindName(kind))));
  } catch (...) {
    RethrowInStep(step);
  }
}

namespace {

struct Step {
  std::string name;
  std::function<void()> run;
};

// Runs the steps of one group, concurrently when jobs > 1. The first
// failure in step order is re-thrown after all workers finish.
void RunGroup(const std::vector<Step>& steps, int jobs, const RunHooks& hooks) {
  std::vector<std::exception_ptr> errors(steps.size());
  auto run_one = [&](size_t i) {
    const Step& step = steps[i];
    if (hooks.skip && hooks.skip(step.name)) return;
    if (hooks.before) hooks.before(step.name);
    try {
      step.run();
      if (hooks.after) hooks.after(step.name, true);
    } catch (...) {
      errors[i] = std::current_exception();
      if (hooks.after) hooks.after(step.name, false);
    }
  };
  const size_t workers =
      std::min<size_t>(steps.size(), static_cast<size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < steps.size(); ++i) {
      run_one(i);
      if (errors[i]) break;
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < steps.size(); i = next++) run_one(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

metrics::RunReport RunPipeline(const ExperimentConfig& cfg, const fs::path& dir,
                               std::shared_ptr<const data::FeatureDataset> data,
                               int jobs, const RunHooks& hooks) {
  Pipeline pipeline(cfg, dir, std::move(data));
  pipeline.WriteConfig();
  auto stage = [&](Stage s) {
    return Step{StageName(s), [&pipeline, s] { pipeline.Run(s); }};
  };
  RunGroup({stage(Stage::kTrainTarget), stage(Stage::kTrainShadow)}, jobs, hooks);
  RunGroup({stage(Stage::kDistillTarget), stage(Stage::kDistillShadow)}, jobs,
           hooks);
  RunGroup({stage(Stage::kTrajectories)}, jobs, hooks);
  std::vector<Step> attack_steps = {stage(Stage::kTrainAttack)};
  for (const std::string& name : cfg.baselines) {
    const Kind kind = *baselines::ParseKind(name);
    attack_steps.push_back(
        {BaselineStep(kind), [&pipeline, kind] { pipeline.RunBaseline(kind); }});
  }
  RunGroup(attack_steps, jobs, hooks);
  RunGroup({stage(Stage::kEvaluate)}, jobs, hooks);
  return metrics::ReadRunReport(dir / artifacts::kReport);
}

}  // namespace trajmia::attack
