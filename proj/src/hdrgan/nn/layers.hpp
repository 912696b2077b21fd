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

#include <string>
#include <vector>

#include "hdrgan/common/rng.hpp"
#include "hdrgan/nn/ops.hpp"

namespace hdrgan::nn {

template <typename T>
struct ParamRef {
  std::string name;
  Var<T>* var;
};

// Non-trainable persistent state (running statistics, power-iteration vectors).
template <typename T>
struct BufferRef {
  std::string name;
  std::vector<T>* data;
};

template <typename T>
struct StateRefs {
  std::vector<ParamRef<T>> params;
  std::vector<BufferRef<T>> buffers;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
template <typename T>
std::vector<T> UniformInit(Rng& rng, size_t count, int fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> v(count);
  for (T& e : v) e = static_cast<T>(dist(rng));
  return v;
}

template <typename T>
struct Conv2dLayer {
  Var<T> weight;
  Var<T> bias;
  int stride = 1;
  int pad = 0;

  Conv2dLayer() = default;
  Conv2dLayer(Rng& rng, int cin, int cout, int k, int stride_, int pad_, bool with_bias = true)
      : stride(stride_), pad(pad_) {
    const int fan_in = cin * k * k;
    weight = Var<T>::Parameter({cout, cin, k, k}, UniformInit<T>(rng, Numel({cout, cin, k, k}), fan_in));
    if (with_bias) bias = Var<T>::Parameter({cout}, UniformInit<T>(rng, cout, fan_in));
  }
  Var<T> operator()(const Var<T>& x) const { return Conv2d(x, weight, bias, stride, pad); }
  void Collect(const std::string& prefix, StateRefs<T>& refs) {
    refs.params.push_back({prefix + ".weight", &weight});
    if (bias.defined()) refs.params.push_back({prefix + ".bias", &bias});
  }
};

template <typename T>
struct ConvTranspose2dLayer {
  Var<T> weight;  // [cin, cout, k, k]
  Var<T> bias;
  int stride = 2;
  int pad = 0;

  ConvTranspose2dLayer() = default;
  ConvTranspose2dLayer(Rng& rng, int cin, int cout, int k, int stride_, int pad_)
      : stride(stride_), pad(pad_) {
    const int fan_in = cout * k * k;
    weight = Var<T>::Parameter({cin, cout, k, k}, UniformInit<T>(rng, Numel({cin, cout, k, k}), fan_in));
    bias = Var<T>::Parameter({cout}, UniformInit<T>(rng, cout, fan_in));
  }
  Var<T> operator()(const Var<T>& x) const { return ConvTranspose2d(x, weight, bias, stride, pad); }
  void Collect(const std::string& prefix, StateRefs<T>& refs) {
    refs.params.push_back({prefix + ".weight", &weight});
    refs.params.push_back({prefix + ".bias", &bias});
  }
};

template <typename T>
struct BatchNormLayer {
  Var<T> gamma;
  Var<T> beta;
  std::vector<T> running_mean;
  std::vector<T> running_var;
  T momentum = T(0.1);
  T eps = T(1e-5);

  BatchNormLayer() = default;
  explicit BatchNormLayer(int channels)
      : gamma(Var<T>::Parameter({channels}, std::vector<T>(channels, T(1)))),
        beta(Var<T>::Parameter({channels}, std::vector<T>(channels, T(0)))),
        running_mean(channels, T(0)),
        running_var(channels, T(1)) {}
  Var<T> operator()(const Var<T>& x, bool training) {
    return BatchNorm2d(x, gamma, beta, running_mean, running_var, training, momentum, eps);
  }
  void Collect(const std::string& prefix, StateRefs<T>& refs) {
    refs.params.push_back({prefix + ".gamma", &gamma});
    refs.params.push_back({prefix + ".beta", &beta});
    refs.buffers.push_back({prefix + ".running_mean", &running_mean});
    refs.buffers.push_back({prefix + ".running_var", &running_var});
  }
};

template <typename T>
struct LinearLayer {
  Var<T> weight;  // [out, in]
  Var<T> bias;

  LinearLayer() = default;
  LinearLayer(Rng& rng, int in, int out)
      : weight(Var<T>::Parameter({out, in}, UniformInit<T>(rng, static_cast<size_t>(out) * in, in))),
        bias(Var<T>::Parameter({out}, UniformInit<T>(rng, out, in))) {}
  Var<T> operator()(const Var<T>& x) const { return Linear(x, weight, bias); }
  void Collect(const std::string& prefix, StateRefs<T>& refs) {
    refs.params.push_back({prefix + ".weight", &weight});
    refs.params.push_back({prefix + ".bias", &bias});
  }
};

template <typename T>
PowerIterationState<T> RandomPowerState(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  PowerIterationState<T> s;
  auto fill = [&](std::vector<T>& v, int n) {
    v.resize(n);
    double norm = 0.0;
    for (T& e : v) {
      e = static_cast<T>(normal(rng));
      norm += static_cast<double>(e) * e;
    }
    norm = std::sqrt(std::max(norm, 1e-24));
    for (T& e : v) e = static_cast<T>(e / norm);
  };
  fill(s.u, rows);
  fill(s.v, cols);
  return s;
}

// Convolution whose weight is spectrally normalized on every forward pass.
template <typename T>
struct SNConv2dLayer {
  Conv2dLayer<T> conv;
  PowerIterationState<T> power;

  SNConv2dLayer() = default;
  SNConv2dLayer(Rng& rng, int cin, int cout, int k, int stride, int pad)
      : conv(rng, cin, cout, k, stride, pad), power(RandomPowerState<T>(rng, cout, cin * k * k)) {
    WarmUp();
  }
  Var<T> operator()(const Var<T>& x, bool training) {
    Var<T> w = SpectralNormalizedWeight(conv.weight, power, training);
    return Conv2d(x, w, conv.bias, conv.stride, conv.pad);
  }
  // Converges the persistent vectors so a fresh layer is usable in eval mode.
  void WarmUp(int iterations = 20) {
    NoGradGuard no_grad;
    SpectralNormalizedWeight(conv.weight, power, true, iterations);
  }
  void Collect(const std::string& prefix, StateRefs<T>& refs) {
    conv.Collect(prefix, refs);
    refs.buffers.push_back({prefix + ".power_u", &power.u});
    refs.buffers.push_back({prefix + ".power_v", &power.v});
  }
};

template <typename T>
struct SNLinearLayer {
  LinearLayer<T> linear;
  PowerIterationState<T> power;

  SNLinearLayer() = default;
  SNLinearLayer(Rng& rng, int in, int out)
      : linear(rng, in, out), power(RandomPowerState<T>(rng, out, in)) {
    WarmUp();
  }
  Var<T> operator()(const Var<T>& x, bool training) {
    Var<T> w = SpectralNormalizedWeight(linear.weight, power, training);
    return Linear(x, w, linear.bias);
  }
  void WarmUp(int iterations = 20) {
    NoGradGuard no_grad;
    SpectralNormalizedWeight(linear.weight, power, true, iterations);
  }
  void Collect(const std::string& prefix, StateRefs<T>& refs) {
    linear.Collect(prefix, refs);
    refs.buffers.push_back({prefix + ".power_u", &power.u});
    refs.buffers.push_back({prefix + ".power_v", &power.v});
  }
};

template <typename T>
size_t CountParameters(const StateRefs<T>& refs) {
  size_t n = 0;
  for (const auto& p : refs.params) n += p.var->numel();
  return n;
}

// FNV-1a over parameter names and raw bytes, in registration order.
template <typename T>
uint64_t ParameterDigest(const StateRefs<T>& refs) {
  uint64_t h = Fnv1a(std::string_view("params"));
  for (const auto& p : refs.params) {
    h = Fnv1a(p.name, h);
    auto v = p.var->value();
    h = Fnv1a(std::span(reinterpret_cast<const unsigned char*>(v.data()), v.size_bytes()), h);
  }
  return h;
}

template <typename T>
void ZeroGrads(const StateRefs<T>& refs) {
  for (const auto& p : refs.params) p.var->ZeroGrad();
}

}  // namespace hdrgan::nn
