// Copyright 2026 The hdrgan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Differentiable ops over NCHW tensors. Every op is instantiated for float
// (training) and double (gradient verification).

#include <span>
#include <vector>

#include "hdrgan/nn/tensor.hpp"

namespace hdrgan::nn {

// Elementwise.
template <typename T> Var<T> Add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> Sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> Mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> Scale(const Var<T>& a, T s);
template <typename T> Var<T> AddScalar(const Var<T>& a, T s);
template <typename T> Var<T> Relu(const Var<T>& a);
template <typename T> Var<T> LeakyRelu(const Var<T>& a, T slope);
template <typename T> Var<T> Sigmoid(const Var<T>& a);
// Gradient passes only where lo < a < hi.
template <typename T> Var<T> Clamp(const Var<T>& a, T lo, T hi);

// Reductions to a scalar.
template <typename T> Var<T> Sum(const Var<T>& a);
template <typename T> Var<T> Mean(const Var<T>& a);
template <typename T> Var<T> MeanAbsDiff(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> MeanSquaredDiff(const Var<T>& a, const Var<T>& b);
// sqrt of a scalar; the gradient at 0 is taken as 0.
template <typename T> Var<T> SqrtScalar(const Var<T>& a);
// mean(log(clamp(p, eps, 1))) and mean(log(clamp(1 - p, eps, 1))).
template <typename T> Var<T> MeanLogClamped(const Var<T>& p, T eps);
template <typename T> Var<T> MeanLogOneMinusClamped(const Var<T>& p, T eps);

// Layout.
template <typename T> Var<T> Reshape(const Var<T>& a, Shape shape);
template <typename T> Var<T> ConcatChannels(const std::vector<Var<T>>& parts);
template <typename T> Var<T> ConcatBatch(const std::vector<Var<T>>& parts);
template <typename T> Var<T> SliceBatch(const Var<T>& a, int start, int count);
template <typename T> Var<T> ReflectPad(const Var<T>& a, int top, int bottom, int left, int right);
template <typename T> Var<T> Crop(const Var<T>& a, int top, int left, int height, int width);

// Layers. `bias` may be undefined.
template <typename T>
Var<T> Conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride, int pad);
// weight is [Cin, Cout, k, k]; output side is (H - 1) * stride - 2 * pad + k.
template <typename T>
Var<T> ConvTranspose2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride,
                       int pad);
template <typename T>
Var<T> BatchNorm2d(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                   std::vector<T>& running_mean, std::vector<T>& running_var, bool training,
                   T momentum, T eps);
template <typename T> Var<T> InstanceNorm2d(const Var<T>& x, T eps);
template <typename T> Var<T> MaxPool2x2(const Var<T>& x);
template <typename T> Var<T> GlobalAvgPool(const Var<T>& x);
// x [N, in], weight [out, in], bias [out].
template <typename T> Var<T> Linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias);

// Bilinear backward warp with clamp-to-edge: out(x, y) = in(x + dx, y + dy).
// flow is [N, 2, H, W] (dx plane then dy plane) and is not differentiated.
template <typename T> Var<T> WarpBackward(const Var<T>& x, std::span<const T> flow);
// Same warp with flow as a differentiable [N, 2, H, W] input. The flow gradient is
// zero where the sample point is clamped to the frame.
template <typename T> Var<T> WarpBackward(const Var<T>& x, const Var<T>& flow);

// Per-sample Gram matrix [N, C, C] normalized by C * H * W.
template <typename T> Var<T> Gram(const Var<T>& x);

// Persistent power-iteration vectors for one weight.
template <typename T>
struct PowerIterationState {
  std::vector<T> u;  // rows
  std::vector<T> v;  // cols
};

// Divides the weight (viewed as [shape[0], rest]) by its power-iteration
// estimate of the top singular value. With `update`, runs `iterations` power
// steps first and stores the vectors back into `state`.
template <typename T>
Var<T> SpectralNormalizedWeight(const Var<T>& weight, PowerIterationState<T>& state, bool update,
                                int iterations = 1, T eps = T(1e-12));

}  // namespace hdrgan::nn
