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

#include "trajmia/nn/mlp.h"

#include <cmath>

#include "trajmia/nn/losses.h"
#include "trajmia/rng.h"

namespace trajmia::nn {

const char* ActivationName(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  Fail(ErrorCode::kInvalidArgument, "unknown activation '" + name + "'");
}

MlpModel MakeZeroMlp(const std::vector<int>& layer_dims,
                     Activation activation) {
  MlpModel model;
  model.layer_dims = layer_dims;
  model.activation = activation;
  Require(layer_dims.size() >= 2, "model needs at least two layer dims");
  for (size_t i = 0; i + 1 < layer_dims.size(); ++i) {
    Require(layer_dims[i] > 0 && layer_dims[i + 1] > 0,
            "layer dims must be positive");
    model.weights.push_back(MatrixF::Zero(layer_dims[i + 1], layer_dims[i]));
    model.biases.push_back(Vector<float>::Zero(layer_dims[i + 1]));
  }
  return model;
}

MlpModel MakeMlp(const std::vector<int>& layer_dims, Activation activation,
                 uint64_t seed) {
  MlpModel model = MakeZeroMlp(layer_dims, activation);
  Rng rng(seed);
  for (int i = 0; i < model.num_layers(); ++i) {
    const double bound = std::sqrt(6.0 / layer_dims[i]);
    MatrixF& w = model.weights[i];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = static_cast<float>(rng.Uniform(-bound, bound));
      }
    }
  }
  return model;
}

MatrixD Posteriors(const MlpModel& model,
                   const Eigen::Ref<const MatrixF>& features) {
  MatrixD post = Forward(model, features).cast<double>();
  SoftmaxRows(post);
  return post;
}

std::vector<int> Predict(const MlpModel& model,
                         const Eigen::Ref<const MatrixF>& features) {
  const MatrixF logits = Forward(model, features);
  std::vector<int> out(logits.rows());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best;
    logits.row(r).maxCoeff(&best);
    out[r] = static_cast<int>(best);
  }
  return out;
}

}  // namespace trajmia::nn
