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

namespace hdrgan::denoiser {

struct DenoiserConfig {
  int depth = 4;
  int base_channels = 32;
  int channels = 3;
};

void Validate(const DenoiserConfig& config);

// Low handles even exposure indices (short exposure), high handles odd ones.
enum class ExposureRole { kLow = 0, kHigh = 1 };

const char* RoleName(ExposureRole role);
ExposureRole ParseRole(const std::string& name);
ExposureRole RoleForExposureIndex(int exposure_index);

enum class DenoiserLossKind { kL1, kL2 };

DenoiserLossKind ParseLossKind(const std::string& name);
const char* LossKindName(DenoiserLossKind kind);

// U-Net: per level conv3x3 + BN + ReLU then 2x2 max-pool; a bottleneck
// conv; per level a 2x2 stride-2 deconvolution, skip concat, conv3x3 + BN +
// ReLU; a 1x1 head predicting a residual added to the input, clamped to [0,1].
template <typename T>
class DenoiserModel {
 public:
  DenoiserModel(const DenoiserConfig& config, ExposureRole role, uint64_t seed);

  // x is [N, C, H, W]; any H, W (reflect-padded to a multiple of 2^depth).
  nn::Var<T> Forward(const nn::Var<T>& x, bool training);

  const DenoiserConfig& config() const { return config_; }
  ExposureRole role() const { return role_; }
  nn::StateRefs<T>& state() { return state_; }
  size_t parameter_count() const { return nn::CountParameters(state_); }

 private:
  struct Level {
    nn::Conv2dLayer<T> conv;
    nn::BatchNormLayer<T> bn;
  };
  struct UpLevel {
    nn::ConvTranspose2dLayer<T> up;
    nn::Conv2dLayer<T> conv;
    nn::BatchNormLayer<T> bn;
  };

  DenoiserConfig config_;
  ExposureRole role_;
  std::vector<Level> down_;
  Level bottleneck_;
  std::vector<UpLevel> up_;
  nn::Conv2dLayer<T> head_;
  nn::StateRefs<T> state_;
};

extern template class DenoiserModel<float>;
extern template class DenoiserModel<double>;

using Denoiser = DenoiserModel<float>;

// Inference in eval mode. The frame's exposure index must match the role.
radiometry::LDRFrame Denoise(Denoiser& model, const radiometry::LDRFrame& noisy);

template <typename T>
nn::Var<T> DenoiserLoss(const nn::Var<T>& pred, const nn::Var<T>& clean,
                        DenoiserLossKind kind = DenoiserLossKind::kL1);

double DenoiserLoss(const radiometry::LDRFrame& pred, const radiometry::LDRFrame& clean,
                    DenoiserLossKind kind = DenoiserLossKind::kL1);

}  // namespace hdrgan::denoiser
