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

#ifndef TRAJMIA_NN_LOSSES_H_
#define TRAJMIA_NN_LOSSES_H_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "trajmia/nn/mlp.h"

namespace trajmia::nn {

// Added inside every log; overfitted models emit posteriors of exactly 0/1.
inline constexpr double kLogFloor = 1e-12;

// Softmax of logits / temperature with max subtraction. Throws
// kInvalidArgument when temperature <= 0.
std::vector<double> SoftmaxTempered(std::span<const double> logits,
                                    double temperature = 1.0);

// In-place row-wise softmax (temperature 1).
template <typename Scalar>
void SoftmaxRows(Matrix<Scalar>& logits) {
  // Plain loops: Eigen's vectorized exp and sum depend on the row's memory
  // alignment, which would make a sample's posterior depend on its batch.
  const Eigen::Index cols = logits.cols();
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Scalar* row = logits.row(r).data();
    Scalar max = row[0];
    for (Eigen::Index c = 1; c < cols; ++c) max = std::max(max, row[c]);
    Scalar total = 0;
    for (Eigen::Index c = 0; c < cols; ++c) total += (row[c] = std::exp(row[c] - max));
    for (Eigen::Index c = 0; c < cols; ++c) row[c] /= total;
  }
}

// -log(posteriors[label] + kLogFloor). Throws on label out of range.
double CrossEntropy(int label, std::span<const double> posteriors);

// sum_i t_i log((t_i + floor) / (s_i + floor)), with 0 log 0 = 0.
double KlDiv(std::span<const double> teacher, std::span<const double> student);

}  // namespace trajmia::nn

#endif  // TRAJMIA_NN_LOSSES_H_
