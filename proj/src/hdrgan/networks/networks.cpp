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

#include "hdrgan/networks/networks.hpp"

#include <cmath>

#include "hdrgan/nn/bridge.hpp"

namespace hdrgan::networks {

using nn::Var;

void Validate(const GeneratorConfig& c) {
  Require(c.input_channels == 12, ErrorCode::kConfig,
          "generator input_channels must be 12 (ref, neighbor and their linearized copies)");
  Require(c.base_channels >= 1, ErrorCode::kConfig, "generator base_channels must be >= 1");
  Require(c.n_resblocks >= 1, ErrorCode::kConfig, "generator n_resblocks must be >= 1");
  Require(c.output_channels == 3, ErrorCode::kConfig, "generator output_channels must be 3");
}

void Validate(const DiscriminatorConfig& c) {
  Require(c.n_conv_layers == 5 && c.n_dense_layers == 2, ErrorCode::kConfig,
          "discriminator has exactly 5 conv and 2 dense layers");
  Require(c.base_channels >= 1, ErrorCode::kConfig, "discriminator base_channels must be >= 1");
  Require(c.leaky_slope >= 0.0 && c.leaky_slope < 1.0, ErrorCode::kConfig,
          "discriminator leaky_slope must be in [0, 1)");
}

DiscriminatorHead ParseHead(const std::string& name) {
  if (name == "probability") return DiscriminatorHead::kProbability;
  if (name == "logit") return DiscriminatorHead::kLogit;
  Fail(ErrorCode::kConfig, "discriminator head must be probability or logit, got '" + name + "'");
}

const char* HeadName(DiscriminatorHead head) {
  return head == DiscriminatorHead::kProbability ? "probability" : "logit";
}

NormScope ParseNormScope(const std::string& name) {
  if (name == "resblocks") return NormScope::kResBlocks;
  if (name == "all") return NormScope::kAll;
  Fail(ErrorCode::kConfig, "norm scope must be resblocks or all, got '" + name + "'");
}

const char* NormScopeName(NormScope scope) { return scope == NormScope::kAll ? "all" : "resblocks"; }

template <typename T>
GeneratorModel<T>::GeneratorModel(const GeneratorConfig& config, uint64_t seed) : config_(config) {
  Validate(config);
  Rng rng(DeriveSeed(seed, "generator"));
  const int b = config.base_channels;
  stem_ = nn::Conv2dLayer<T>(rng, config.input_channels, b, 7, 1, 3);
  down1_ = nn::Conv2dLayer<T>(rng, b, 2 * b, 3, 2, 1);
  down2_ = nn::Conv2dLayer<T>(rng, 2 * b, 4 * b, 3, 2, 1);
  for (int i = 0; i < config.n_resblocks; ++i) {
    ResBlock block;
    block.a = nn::Conv2dLayer<T>(rng, 4 * b, 4 * b, 3, 1, 1);
    block.b = nn::Conv2dLayer<T>(rng, 4 * b, 4 * b, 3, 1, 1);
    res_.push_back(std::move(block));
  }
  up1_ = nn::ConvTranspose2dLayer<T>(rng, 4 * b, 2 * b, 4, 2, 1);
  up2_ = nn::ConvTranspose2dLayer<T>(rng, 2 * b, b, 4, 2, 1);
  out_ = nn::Conv2dLayer<T>(rng, b, config.output_channels, 7, 1, 3);

  stem_.Collect("stem", state_);
  down1_.Collect("down1", state_);
  down2_.Collect("down2", state_);
  for (size_t i = 0; i < res_.size(); ++i) {
    res_[i].a.Collect("res" + std::to_string(i) + ".a", state_);
    res_[i].b.Collect("res" + std::to_string(i) + ".b", state_);
  }
  up1_.Collect("up1", state_);
  up2_.Collect("up2", state_);
  out_.Collect("out", state_);
}

template <typename T>
Var<T> GeneratorModel<T>::Forward(const Var<T>& x) {
  Require(x.rank() == 4 && x.dim(1) == config_.input_channels, ErrorCode::kShapeMismatch,
          "generator expects [N, " + std::to_string(config_.input_channels) + ", H, W], got " +
              nn::ShapeStr(x.shape()));
  const int h = x.dim(2), w = x.dim(3);
  const int ph = (kDownsampleFactor - h % kDownsampleFactor) % kDownsampleFactor;
  const int pw = (kDownsampleFactor - w % kDownsampleFactor) % kDownsampleFactor;
  Require(ph < h && pw < w, ErrorCode::kShapeMismatch, "generator input too small");
  Var<T> y = (ph || pw) ? nn::ReflectPad(x, 0, ph, 0, pw) : x;
  const T eps = T(1e-5);
  auto unit = [&](const Var<T>& v) { return nn::Relu(nn::InstanceNorm2d(v, eps)); };
  const bool norm_all = config_.norm_scope == NormScope::kAll;
  auto outer = [&](const Var<T>& v) { return norm_all ? unit(v) : nn::Relu(v); };
  y = outer(stem_(y));
  y = outer(down1_(y));
  y = outer(down2_(y));
  bottleneck_shape_ = y.shape();
  for (auto& block : res_) y = nn::Add(y, unit(block.b(unit(block.a(y)))));
  y = outer(up1_(y));
  y = outer(up2_(y));
  y = nn::Sigmoid(out_(y));
  return (ph || pw) ? nn::Crop(y, 0, 0, h, w) : y;
}

template <typename T>
DiscriminatorModel<T>::DiscriminatorModel(const DiscriminatorConfig& config, uint64_t seed)
    : config_(config) {
  Validate(config);
  Rng rng(DeriveSeed(seed, "discriminator"));
  const int b = config.base_channels;
  const int widths[] = {6, b, 2 * b, 4 * b, 8 * b, 8 * b};
  for (int i = 0; i < 5; ++i) convs_.emplace_back(rng, widths[i], widths[i + 1], 3, 2, 1);
  dense_.emplace_back(rng, 8 * b, 8 * b);
  dense_.emplace_back(rng, 8 * b, 1);
  for (size_t i = 0; i < convs_.size(); ++i) convs_[i].Collect("conv" + std::to_string(i), state_);
  for (size_t i = 0; i < dense_.size(); ++i) dense_[i].Collect("dense" + std::to_string(i), state_);
}

template <typename T>
Var<T> DiscriminatorModel<T>::Forward(const Var<T>& x, bool training) {
  Require(x.rank() == 4 && x.dim(1) == 6, ErrorCode::kShapeMismatch,
          "discriminator expects [N, 6, H, W], got " + nn::ShapeStr(x.shape()));
  const T slope = static_cast<T>(config_.leaky_slope);
  Var<T> y = x;
  for (auto& conv : convs_) y = nn::LeakyRelu(conv(y, training), slope);
  y = nn::GlobalAvgPool(y);
  y = nn::LeakyRelu(dense_[0](y, training), slope);
  y = dense_[1](y, training);
  return config_.head == DiscriminatorHead::kProbability ? nn::Sigmoid(y) : y;
}

template class GeneratorModel<float>;
template class GeneratorModel<double>;
template class DiscriminatorModel<float>;
template class DiscriminatorModel<double>;

Raster GeneratorInput(const radiometry::LDRFrame& ref, const radiometry::LDRFrame& aligned_nbr) {
  RequireSameShape(ref.data, aligned_nbr.data, "generate");
  Require(ref.data.channels() == 3, ErrorCode::kShapeMismatch, "generate: expected RGB frames");
  const auto lin_ref = radiometry::LinearizeLdr(ref);
  const auto lin_nbr = radiometry::LinearizeLdr(aligned_nbr);
  const Raster* parts[] = {&ref.data, &aligned_nbr.data, &lin_ref.data, &lin_nbr.data};
  Raster out(ref.data.height(), ref.data.width(), 12);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      for (int p = 0; p < 4; ++p)
        for (int c = 0; c < 3; ++c) out.at(y, x, 3 * p + c) = parts[p]->at(y, x, c);
  return out;
}

radiometry::TonemappedFrame Generate(Generator& g, const radiometry::LDRFrame& ref,
                                     const radiometry::LDRFrame& aligned_nbr) {
  radiometry::Validate(ref);
  radiometry::Validate(aligned_nbr);
  const Raster input = GeneratorInput(ref, aligned_nbr);
  nn::NoGradGuard no_grad;
  const Raster* in[] = {&input};
  Var<float> out = g.Forward(nn::StackRasters<float>(std::span<const Raster* const>(in)));
  return {nn::TensorToRaster(out, 0)};
}

std::vector<float> Discriminate(Discriminator& d,
                                const std::vector<radiometry::TonemappedFrame>& current,
                                const std::vector<radiometry::TonemappedFrame>& previous) {
  Require(current.size() == previous.size() && !current.empty(), ErrorCode::kInvalidArgument,
          "discriminate: need equally many current and previous frames");
  std::vector<const Raster*> cur, prev;
  for (size_t i = 0; i < current.size(); ++i) {
    RequireSameShape(current[i].data, previous[i].data, "discriminate");
    RequireSameShape(current[i].data, current[0].data, "discriminate");
    cur.push_back(&current[i].data);
    prev.push_back(&previous[i].data);
  }
  nn::NoGradGuard no_grad;
  Var<float> x = nn::ConcatChannels<float>(
      {nn::StackRasters<float>(std::span<const Raster* const>(cur)),
       nn::StackRasters<float>(std::span<const Raster* const>(prev))});
  Var<float> s = d.Forward(x, false);
  return {s.value().begin(), s.value().end()};
}

SpectralNormResult SpectralNormalize(const std::vector<double>& weight, int rows, int cols,
                                     nn::PowerIterationState<double>& state, int iterations) {
  Require(rows > 0 && cols > 0 && weight.size() == static_cast<size_t>(rows) * cols,
          ErrorCode::kShapeMismatch, "spectral_normalize: weight size does not match dims");
  Require(iterations >= 1, ErrorCode::kInvalidArgument, "spectral_normalize: iterations >= 1");
  if (state.u.size() != static_cast<size_t>(rows) || state.v.size() != static_cast<size_t>(cols)) {
    Rng rng(DeriveSeed(0, {static_cast<uint64_t>(rows), static_cast<uint64_t>(cols)}));
    state = nn::RandomPowerState<double>(rng, rows, cols);
  }
  nn::NoGradGuard no_grad;
  Var<double> w = Var<double>::Constant({rows, cols}, weight);
  Var<double> wn = nn::SpectralNormalizedWeight(w, state, true, iterations);
  SpectralNormResult out;
  out.weight.assign(wn.value().begin(), wn.value().end());
  // sigma = u^T W v with the updated vectors.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.sigma += state.u[r] * weight[r * cols + c] * state.v[c];
  return out;
}

}  // namespace hdrgan::networks
