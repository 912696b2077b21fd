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

#include <cstdint>
#include <string>
#include <vector>

#include "hdrgan/nn/layers.hpp"
#include "hdrgan/radiometry/radiometry.hpp"

namespace hdrgan::networks {

inline constexpr int kDownsampleFactor = 4;

// Where instance norm is applied. kAll normalizes the stem, sampling stages
// and residual units; kResBlocks only the residual units, so the absolute
// exposure level survives through the stem and the identity paths.
enum class NormScope { kResBlocks, kAll };

struct GeneratorConfig {
  int input_channels = 12;
  int base_channels = 64;
  int n_resblocks = 8;
  int output_channels = 3;
  NormScope norm_scope = NormScope::kResBlocks;
};

NormScope ParseNormScope(const std::string& name);
const char* NormScopeName(NormScope scope);

enum class DiscriminatorHead { kProbability, kLogit };

struct DiscriminatorConfig {
  int n_conv_layers = 5;
  int n_dense_layers = 2;
  int base_channels = 64;
  double leaky_slope = 0.2;
  DiscriminatorHead head = DiscriminatorHead::kProbability;
};

void Validate(const GeneratorConfig& config);
void Validate(const DiscriminatorConfig& config);
DiscriminatorHead ParseHead(const std::string& name);
const char* HeadName(DiscriminatorHead head);

// Stem conv7x7, two stride-2 conv3x3 stages, residual blocks of two
// (conv3x3 + instance norm + ReLU) units, two transposed-conv stages and a
// conv7x7 output with sigmoid.
template <typename T>
class GeneratorModel {
 public:
  GeneratorModel(const GeneratorConfig& config, uint64_t seed);

  // x is [N, input_channels, H, W]; output [N, 3, H, W] in [0,1].
  nn::Var<T> Forward(const nn::Var<T>& x);

  const GeneratorConfig& config() const { return config_; }
  nn::StateRefs<T>& state() { return state_; }
  size_t parameter_count() const { return nn::CountParameters(state_); }
  int resblock_count() const { return static_cast<int>(res_.size()); }
  // Shape entering the first residual block on the most recent forward.
  const nn::Shape& last_bottleneck_shape() const { return bottleneck_shape_; }

 private:
  struct ResBlock {
    nn::Conv2dLayer<T> a;
    nn::Conv2dLayer<T> b;
  };

  GeneratorConfig config_;
  nn::Conv2dLayer<T> stem_, down1_, down2_;
  std::vector<ResBlock> res_;
  nn::ConvTranspose2dLayer<T> up1_, up2_;
  nn::Conv2dLayer<T> out_;
  nn::StateRefs<T> state_;
  nn::Shape bottleneck_shape_;
};

// Five stride-2 spectrally normalized conv3x3 layers with LeakyReLU, global
// average pooling, then two spectrally normalized dense layers.
template <typename T>
class DiscriminatorModel {
 public:
  DiscriminatorModel(const DiscriminatorConfig& config, uint64_t seed);

  // x is [N, 6, H, W] (current then previous frame); output [N, 1].
  // `training` advances the power iteration.
  nn::Var<T> Forward(const nn::Var<T>& x, bool training);

  const DiscriminatorConfig& config() const { return config_; }
  nn::StateRefs<T>& state() { return state_; }
  size_t parameter_count() const { return nn::CountParameters(state_); }
  int conv_layer_count() const { return static_cast<int>(convs_.size()); }
  int dense_layer_count() const { return static_cast<int>(dense_.size()); }
  std::vector<nn::SNConv2dLayer<T>>& convs() { return convs_; }
  std::vector<nn::SNLinearLayer<T>>& dense() { return dense_; }

 private:
  DiscriminatorConfig config_;
  std::vector<nn::SNConv2dLayer<T>> convs_;
  std::vector<nn::SNLinearLayer<T>> dense_;
  nn::StateRefs<T> state_;
};

extern template class GeneratorModel<float>;
extern template class GeneratorModel<double>;
extern template class DiscriminatorModel<float>;
extern template class DiscriminatorModel<double>;

using Generator = GeneratorModel<float>;
using Discriminator = DiscriminatorModel<float>;

// Reference, aligned neighbor, then both linearized: 12 channels, HWC.
// The neighbor may share the reference exposure (frame-0 fallback).
Raster GeneratorInput(const radiometry::LDRFrame& ref, const radiometry::LDRFrame& aligned_nbr);

radiometry::TonemappedFrame Generate(Generator& g, const radiometry::LDRFrame& ref,
                                     const radiometry::LDRFrame& aligned_nbr);

// One score per pair, eval mode.
std::vector<float> Discriminate(Discriminator& d,
                                const std::vector<radiometry::TonemappedFrame>& current,
                                const std::vector<radiometry::TonemappedFrame>& previous);

struct SpectralNormResult {
  std::vector<double> weight;  // rows x cols, row-major
  double sigma = 0.0;          // power-iteration estimate
};

// Runs `iterations` power steps on the persistent state and divides the
// matrix by the resulting estimate. A zero matrix stays zero.
SpectralNormResult SpectralNormalize(const std::vector<double>& weight, int rows, int cols,
                                     nn::PowerIterationState<double>& state, int iterations = 1);

}  // namespace hdrgan::networks
