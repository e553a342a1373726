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

#ifndef TRAJMIA_NN_MLP_H_
#define TRAJMIA_NN_MLP_H_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "trajmia/error.h"

namespace trajmia::nn {

template <typename Scalar>
using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

// Applied to hidden layers only; the output layer emits raw logits.
enum class Activation : uint8_t { kRelu = 0, kTanh = 1 };

const char* ActivationName(Activation activation);
Activation ParseActivation(const std::string& name);

// Dense feed-forward network. layer_dims = {input, hidden..., classes};
// weights[i] is (layer_dims[i+1] x layer_dims[i]), biases[i] has
// layer_dims[i+1] entries.
template <typename Scalar>
struct BasicMlp {
  std::vector<int> layer_dims;
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
  Activation activation = Activation::kRelu;

  int input_dim() const { return layer_dims.front(); }
  int num_classes() const { return layer_dims.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }

  size_t ParameterCount() const {
    size_t count = 0;
    for (int i = 0; i < num_layers(); ++i) {
      count += weights[i].size() + biases[i].size();
    }
    return count;
  }

  bool AllFinite() const {
    for (int i = 0; i < num_layers(); ++i) {
      if (!weights[i].allFinite() || !biases[i].allFinite()) return false;
    }
    return true;
  }

  template <typename Other>
  BasicMlp<Other> Cast() const {
    BasicMlp<Other> out;
    out.layer_dims = layer_dims;
    out.activation = activation;
    for (int i = 0; i < num_layers(); ++i) {
      out.weights.push_back(weights[i].template cast<Other>());
      out.biases.push_back(biases[i].template cast<Other>());
    }
    return out;
  }

  bool operator==(const BasicMlp& other) const {
    if (layer_dims != other.layer_dims || activation != other.activation) {
      return false;
    }
    for (int i = 0; i < num_layers(); ++i) {
      if (weights[i] != other.weights[i] || biases[i] != other.biases[i]) {
        return false;
      }
    }
    return true;
  }
};

using MlpModel = BasicMlp<float>;

// Throws kInvalidArgument unless dims are positive and every parameter
// block has the shape implied by layer_dims.
template <typename Scalar>
void ValidateModel(const BasicMlp<Scalar>& model) {
  Require(model.layer_dims.size() >= 2, "model needs at least two layer dims");
  for (int d : model.layer_dims) Require(d > 0, "layer dims must be positive");
  const size_t layers = model.layer_dims.size() - 1;
  Require(model.weights.size() == layers && model.biases.size() == layers,
          "parameter block count does not match layer dims");
  for (size_t i = 0; i < layers; ++i) {
    Require(model.weights[i].rows() == model.layer_dims[i + 1] &&
                model.weights[i].cols() == model.layer_dims[i] &&
                model.biases[i].size() == model.layer_dims[i + 1],
            "parameter shape mismatch at layer " + std::to_string(i));
  }
}

// All-zero parameters.
MlpModel MakeZeroMlp(const std::vector<int>& layer_dims,
                     Activation activation = Activation::kRelu);

// He-style uniform init: weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)),
// zero biases.
MlpModel MakeMlp(const std::vector<int>& layer_dims, Activation activation,
                 uint64_t seed);

template <typename Scalar>
void ApplyActivation(Activation activation, Matrix<Scalar>& values) {
  if (activation == Activation::kRelu) {
    values = values.cwiseMax(Scalar(0));
  } else {
    values = values.array().tanh().matrix();
  }
}

// Logits for a batch of rows. Throws kInvalidArgument on a feature-width
// mismatch.
template <typename Scalar>
Matrix<Scalar> Forward(const BasicMlp<Scalar>& model,
                       const Eigen::Ref<const Matrix<Scalar>>& features) {
  Require(features.cols() == model.input_dim(),
          "feature width " + std::to_string(features.cols()) +
              " does not match model input dim " +
              std::to_string(model.input_dim()));
  Matrix<Scalar> current = features;
  for (int i = 0; i < model.num_layers(); ++i) {
    // One product per row on an aligned copy of the row: a sample's logits are
    // bit-identical whether it is evaluated alone or inside a batch.
    Matrix<Scalar> next(current.rows(), model.layer_dims[i + 1]);
    Vector<Scalar> x(current.cols());
    Vector<Scalar> y(next.cols());
    for (Eigen::Index r = 0; r < current.rows(); ++r) {
      x = current.row(r).transpose();
      y.noalias() = model.weights[i] * x;
      next.row(r) = y.transpose();
    }
    next.rowwise() += model.biases[i].transpose();
    if (i + 1 < model.num_layers()) ApplyActivation(model.activation, next);
    current = std::move(next);
  }
  return current;
}

// Row-wise softmax of float logits, evaluated in double.
MatrixD Posteriors(const MlpModel& model,
                   const Eigen::Ref<const MatrixF>& features);

// Row-wise argmax (lowest index wins ties).
std::vector<int> Predict(const MlpModel& model,
                         const Eigen::Ref<const MatrixF>& features);

}  // namespace trajmia::nn

#endif  // TRAJMIA_NN_MLP_H_
