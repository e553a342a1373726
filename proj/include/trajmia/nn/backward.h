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

#ifndef TRAJMIA_NN_BACKWARD_H_
#define TRAJMIA_NN_BACKWARD_H_

#include <cmath>
#include <span>
#include <vector>

#include "trajmia/nn/losses.h"
#include "trajmia/nn/mlp.h"

namespace trajmia::nn {

enum class LossKind { kCrossEntropy, kKl };

// What the batch is scored against: integer labels (cross-entropy) or a
// teacher posterior table aligned row-for-row with the batch (KL).
template <typename Scalar>
struct LossTarget {
  LossKind kind = LossKind::kCrossEntropy;
  std::span<const int> labels;
  const Matrix<Scalar>* teacher = nullptr;

  static LossTarget CrossEntropy(std::span<const int> labels) {
    return {LossKind::kCrossEntropy, labels, nullptr};
  }
  static LossTarget Kl(const Matrix<Scalar>& teacher) {
    return {LossKind::kKl, {}, &teacher};
  }
};

template <typename Scalar>
struct Gradients {
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;

  double SquaredNorm() const {
    double total = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      total += static_cast<double>(weights[i].squaredNorm()) +
               static_cast<double>(biases[i].squaredNorm());
    }
    return total;
  }
};

// Intermediate values of one forward/backward pass. deltas[l] holds the
// per-sample derivative of that sample's loss w.r.t. the pre-activations of
// layer l; the batch gradient is their average contracted with inputs[l].
template <typename Scalar>
struct BackwardTape {
  std::vector<Matrix<Scalar>> inputs;
  std::vector<Matrix<Scalar>> deltas;
  std::vector<double> losses;
};

template <typename Scalar>
BackwardTape<Scalar> RunBackward(const BasicMlp<Scalar>& model,
                                 const Eigen::Ref<const Matrix<Scalar>>& features,
                                 const LossTarget<Scalar>& target) {
  const Eigen::Index batch = features.rows();
  const int classes = model.num_classes();
  Require(features.cols() == model.input_dim(),
          "batch feature width does not match model input dim");
  if (target.kind == LossKind::kCrossEntropy) {
    Require(static_cast<Eigen::Index>(target.labels.size()) == batch,
            "label count does not match batch size");
  } else {
    Require(target.teacher != nullptr && target.teacher->rows() == batch &&
                target.teacher->cols() == classes,
            "teacher posterior table does not match batch");
  }

  BackwardTape<Scalar> tape;
  const int layers = model.num_layers();
  tape.inputs.reserve(layers);
  tape.deltas.resize(layers);

  Matrix<Scalar> current = features;
  for (int i = 0; i < layers; ++i) {
    Matrix<Scalar> next = current * model.weights[i].transpose();
    next.rowwise() += model.biases[i].transpose();
    if (i + 1 < layers) ApplyActivation(model.activation, next);
    tape.inputs.push_back(std::move(current));
    current = std::move(next);
  }

  // current holds logits. Loss values are computed in double from the
  // logits; deltas (softmax minus target) stay in Scalar.
  tape.losses.resize(batch);
  Matrix<Scalar> delta = current;
  SoftmaxRows(delta);
  for (Eigen::Index r = 0; r < batch; ++r) {
    Eigen::VectorXd logits = current.row(r).transpose().template cast<double>();
    logits.array() -= logits.maxCoeff();
    Eigen::VectorXd post = logits.array().exp();
    post /= post.sum();
    if (target.kind == LossKind::kCrossEntropy) {
      const int label = target.labels[r];
      Require(label >= 0 && label < classes, "label out of range");
      tape.losses[r] = -std::log(post[label] + kLogFloor);
      delta(r, label) -= Scalar(1);
    } else {
      double loss = 0.0;
      for (int c = 0; c < classes; ++c) {
        const double t = static_cast<double>((*target.teacher)(r, c));
        if (t > 0.0) loss += t * std::log((t + kLogFloor) / (post[c] + kLogFloor));
      }
      tape.losses[r] = loss;
      delta.row(r) -= target.teacher->row(r);
    }
  }

  for (int i = layers - 1; i >= 0; --i) {
    if (i < layers - 1) {
      // Derivative of the hidden activation, read back from its output.
      const Matrix<Scalar>& out = tape.inputs[i + 1];
      if (model.activation == Activation::kRelu) {
        delta = delta.cwiseProduct(
            (out.array() > Scalar(0)).template cast<Scalar>().matrix());
      } else {
        delta = delta.cwiseProduct(
            (Scalar(1) - out.array().square()).matrix());
      }
    }
    Matrix<Scalar> upstream;
    if (i > 0) upstream = delta * model.weights[i];
    tape.deltas[i] = std::move(delta);
    delta = std::move(upstream);
  }
  return tape;
}

// Gradient of the mean per-sample loss. With row_scale set, sample r's
// contribution is multiplied by row_scale[r] before averaging.
template <typename Scalar>
Gradients<Scalar> MeanGradients(const BackwardTape<Scalar>& tape,
                                std::span<const Scalar> row_scale = {}) {
  Gradients<Scalar> grads;
  const size_t layers = tape.deltas.size();
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  const Eigen::Index batch = tape.deltas.front().rows();
  const Scalar inv = Scalar(1) / static_cast<Scalar>(batch);
  for (size_t i = 0; i < layers; ++i) {
    if (row_scale.empty()) {
      grads.weights[i] = (tape.deltas[i].transpose() * tape.inputs[i]) * inv;
      grads.biases[i] = tape.deltas[i].colwise().sum().transpose() * inv;
    } else {
      Eigen::Map<const Vector<Scalar>> scale(row_scale.data(), batch);
      Matrix<Scalar> scaled = scale.asDiagonal() * tape.deltas[i];
      grads.weights[i] = (scaled.transpose() * tape.inputs[i]) * inv;
      grads.biases[i] = scaled.colwise().sum().transpose() * inv;
    }
  }
  return grads;
}

// L2 norm of each sample's own gradient. A dense layer's per-sample weight
// gradient is the outer product delta x input, whose Frobenius norm is
// |delta| * |input|, so no per-sample gradient is materialized.
template <typename Scalar>
std::vector<double> PerExampleGradientNorms(const BackwardTape<Scalar>& tape) {
  const Eigen::Index batch = tape.deltas.front().rows();
  std::vector<double> norms(batch, 0.0);
  for (size_t i = 0; i < tape.deltas.size(); ++i) {
    const auto delta_sq = tape.deltas[i].rowwise().squaredNorm();
    const auto input_sq = tape.inputs[i].rowwise().squaredNorm();
    for (Eigen::Index r = 0; r < batch; ++r) {
      norms[r] += static_cast<double>(delta_sq[r]) *
                  (static_cast<double>(input_sq[r]) + 1.0);
    }
  }
  for (double& n : norms) n = std::sqrt(n);
  return norms;
}

// Mean loss over the batch; writes the gradient of that mean into *grads.
template <typename Scalar>
double Backward(const BasicMlp<Scalar>& model,
                const Eigen::Ref<const Matrix<Scalar>>& features,
                const LossTarget<Scalar>& target, Gradients<Scalar>* grads) {
  BackwardTape<Scalar> tape = RunBackward(model, features, target);
  *grads = MeanGradients(tape);
  double total = 0.0;
  for (double l : tape.losses) total += l;
  return total / static_cast<double>(tape.losses.size());
}

}  // namespace trajmia::nn

#endif  // TRAJMIA_NN_BACKWARD_H_
