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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "trajmia/attack/attack.h"
#include "trajmia/attack/config.h"
#include "trajmia/attack/pipeline.h"
#include "trajmia/data/dataset.h"
#include "trajmia/error.h"
#include "trajmia/metrics/export.h"
#include "trajmia/metrics/metrics.h"
#include "trajmia/nn/losses.h"
#include "trajmia/trajectory/trajectory.h"

namespace py = pybind11;
namespace fs = std::filesystem;

namespace trajmia {
namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

std::vector<double> ToVector(const DoubleArray& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

std::vector<int> ToVector(const IntArray& a) {
  return std::vector<int>(a.data(), a.data() + a.size());
}

template <typename T>
py::array_t<T> ToArray(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> RocArray(const std::vector<metrics::RocPoint>& roc) {
  py::array_t<double> out({static_cast<py::ssize_t>(roc.size()), py::ssize_t{2}});
  auto v = out.mutable_unchecked<2>();
  for (size_t i = 0; i < roc.size(); ++i) {
    v(i, 0) = roc[i].fpr;
    v(i, 1) = roc[i].tpr;
  }
  return out;
}

attack::ExperimentConfig ConfigFrom(const std::string& text,
                                    const py::dict& overrides) {
  attack::ExperimentConfig cfg = attack::ParseConfig(text, "<python>");
  for (const auto& [key, value] : overrides) {
    attack::SetConfigValue(cfg, py::str(key).cast<std::string>(),
                           py::str(value).cast<std::string>());
  }
  attack::ValidateConfig(cfg);
  return cfg;
}

py::dict TrajectoryDict(const trajectory::TrajectorySet& set) {
  const size_t rows = set.records.size();
  const size_t cols = rows == 0 ? 0 : set.records[0].losses.size();
  py::array_t<double> losses({rows, cols});
  py::array_t<uint64_t> ids(rows);
  py::array_t<int> member(rows);
  auto l = losses.mutable_unchecked<2>();
  for (size_t i = 0; i < rows; ++i) {
    const auto& r = set.records[i];
    ids.mutable_at(i) = r.id;
    member.mutable_at(i) = r.member.value_or(-1);
    for (size_t j = 0; j < cols; ++j) l(i, j) = r.losses[j];
  }
  py::dict d;
  d["ids"] = ids;
  d["losses"] = losses;
  d["member"] = member;
  return d;
}

}  // namespace
}  // namespace trajmia

PYBIND11_MODULE(_trajmia, m) {
  using namespace trajmia;
  m.doc() = "Loss-trajectory membership inference toolkit";

  static py::handle error = py::exception<Error>(m, "Error").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message =
          std::string(ErrorCodeName(e.code())) + ": " + e.what();
      py::set_error(error, message.c_str());
    }
  });

  m.def(
      "synth_generate",
      [](int class_count, int dim, int per_class, double cluster_spread,
         uint64_t seed) {
        data::SynthSpec spec;
        spec.class_count = class_count;
        spec.dim = dim;
        spec.per_class = per_class;
        spec.cluster_spread = cluster_spread;
        spec.seed = seed;
        data::FeatureDataset d = data::SynthGenerate(spec);
        py::array_t<float> x({d.features.rows(), d.features.cols()});
        std::copy(d.features.data(), d.features.data() + d.features.size(),
                  x.mutable_data());
        return py::make_tuple(x, ToArray(d.labels));
      },
      py::arg("class_count"), py::arg("dim"), py::arg("per_class"),
      py::arg("cluster_spread"), py::arg("seed"));

  m.def(
      "softmax",
      [](const DoubleArray& logits, double temperature) {
        const std::vector<double> p = nn::SoftmaxTempered(ToVector(logits), temperature);
        return ToArray(p);
      },
      py::arg("logits"), py::arg("temperature") = 1.0);
  m.def(
      "kl_div",
      [](const DoubleArray& teacher, const DoubleArray& student) {
        return nn::KlDiv(ToVector(teacher), ToVector(student));
      },
      py::arg("teacher"), py::arg("student"));
  m.def(
      "cross_entropy",
      [](int label, const DoubleArray& posteriors) {
        return nn::CrossEntropy(label, ToVector(posteriors));
      },
      py::arg("label"), py::arg("posteriors"));

  m.def(
      "roc",
      [](const DoubleArray& scores, const IntArray& labels) {
        return RocArray(metrics::Roc(ToVector(scores), ToVector(labels)));
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "auc",
      [](const DoubleArray& scores, const IntArray& labels) {
        return metrics::Auc(metrics::Roc(ToVector(scores), ToVector(labels)));
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "tpr_at_fpr",
      [](const DoubleArray& scores, const IntArray& labels, double fpr) {
        return metrics::TprAtFpr(metrics::Roc(ToVector(scores), ToVector(labels)),
                                 fpr);
      },
      py::arg("scores"), py::arg("labels"), py::arg("fpr") = metrics::kLowFpr);
  m.def(
      "max_balanced_accuracy",
      [](const DoubleArray& scores, const IntArray& labels) {
        const metrics::BalancedAccuracy b =
            metrics::MaxBalancedAccuracy(ToVector(scores), ToVector(labels));
        return py::make_tuple(b.value, b.threshold);
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "config_entries",
      [](const std::string& text, const py::dict& overrides) {
        return attack::ConfigEntries(ConfigFrom(text, overrides));
      },
      py::arg("text"), py::arg("overrides") = py::dict());
  m.def(
      "config_digest",
      [](const std::string& text, const py::dict& overrides) {
        return attack::ConfigDigest(ConfigFrom(text, overrides));
      },
      py::arg("text"), py::arg("overrides") = py::dict());

  m.def(
      "run_pipeline",
      [](const std::string& text, const fs::path& out, const py::dict& overrides,
         int jobs) {
        const attack::ExperimentConfig cfg = ConfigFrom(text, overrides);
        metrics::RunReport report;
        {
          py::gil_scoped_release release;
          report = attack::RunPipeline(cfg, out, nullptr, jobs);
        }
        return metrics::RunReportToJson(report);
      },
      py::arg("text"), py::arg("out"), py::arg("overrides") = py::dict(),
      py::arg("jobs") = 1);

  m.def(
      "load_trajectories",
      [](const fs::path& path) { return TrajectoryDict(trajectory::LoadCsv(path)); },
      py::arg("path"));
  m.def(
      "score_trajectories",
      [](const fs::path& attack_model, const fs::path& trajectories) {
        const attack::AttackModel model = attack::LoadAttack(attack_model);
        const std::vector<double> s =
            attack::Score(model, trajectory::LoadCsv(trajectories));
        return ToArray(s);
      },
      py::arg("attack_model"), py::arg("trajectories"));
}
