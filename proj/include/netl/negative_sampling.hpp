/*
 * Copyright 2026 The NETL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Core>
#include <cmath>

#include "netl/error.hpp"

// Negative-sampling objective for one (input, positive, negatives) update.
// The first row of `outputs` is the positive output vector; the remaining
// rows are noise vectors. Both the loss and its gradient are written against
// Eigen expressions so the same code serves float training and double
// gradient checks.
namespace netl {

template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  if (x >= Scalar(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// -log s(u_0 . v) - sum_j log s(-u_j . v)
template <typename InputDerived, typename OutputDerived>
typename InputDerived::Scalar negative_sampling_loss(
    const Eigen::MatrixBase<InputDerived>& input,
    const Eigen::MatrixBase<OutputDerived>& outputs) {
  using Scalar = typename InputDerived::Scalar;
  Scalar loss(0);
  for (Eigen::Index j = 0; j < outputs.rows(); ++j) {
    const Scalar score = outputs.row(j).dot(input);
    loss -= log_sigmoid(j == 0 ? score : -score);
  }
  return loss;
}

// Gradient of negative_sampling_loss. `grad_input` has the shape of `input`
// (row vector) and `grad_outputs` the shape of `outputs`.
template <typename InputDerived, typename OutputDerived, typename GradInput,
          typename GradOutputs>
void negative_sampling_gradient(const Eigen::MatrixBase<InputDerived>& input,
                                const Eigen::MatrixBase<OutputDerived>& outputs,
                                const Eigen::MatrixBase<GradInput>& grad_input_,
                                const Eigen::MatrixBase<GradOutputs>& grad_outputs_) {
  using Scalar = typename InputDerived::Scalar;
  if (outputs.cols() != input.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "negative sampling output width differs from input");
  }
  // Eigen's idiom for writable expression arguments (blocks, Refs).
  auto& grad_input = const_cast<Eigen::MatrixBase<GradInput>&>(grad_input_);
  auto& grad_outputs =
      const_cast<Eigen::MatrixBase<GradOutputs>&>(grad_outputs_);
  grad_input.setZero();
  for (Eigen::Index j = 0; j < outputs.rows(); ++j) {
    const Scalar label = j == 0 ? Scalar(1) : Scalar(0);
    const Scalar score = outputs.row(j).dot(input);
    // d/ds of the per-row loss is sigmoid(s) - label.
    const Scalar coeff = sigmoid(score) - label;
    grad_input += coeff * outputs.row(j);
    grad_outputs.row(j) = coeff * input;
  }
}

}  // namespace netl
