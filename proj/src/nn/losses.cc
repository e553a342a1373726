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

#include "trajmia/nn/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace trajmia::nn {

std::vector<double> SoftmaxTempered(std::span<const double> logits,
                                    double temperature) {
  Require(temperature > 0.0, "temperature must be positive");
  Require(!logits.empty(), "softmax of an empty vector");
  const double max = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - max) / temperature);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double CrossEntropy(int label, std::span<const double> posteriors) {
  Require(label >= 0 && static_cast<size_t>(label) < posteriors.size(),
          "label " + std::to_string(label) + " out of range for " +
              std::to_string(posteriors.size()) + " classes");
  return -std::log(posteriors[label] + kLogFloor);
}

double KlDiv(std::span<const double> teacher, std::span<const double> student) {
  Require(teacher.size() == student.size(),
          "KL divergence of vectors with different lengths");
  double total = 0.0;
  for (size_t i = 0; i < teacher.size(); ++i) {
    if (teacher[i] <= 0.0) continue;
    total += teacher[i] *
             std::log((teacher[i] + kLogFloor) / (student[i] + kLogFloor));
  }
  return total;
}

}  // namespace trajmia::nn
