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

#include "hdrgan/denoiser/denoiser.hpp"

#include "hdrgan/nn/bridge.hpp"

namespace hdrgan::denoiser {

using nn::Var;

void Validate(const DenoiserConfig& config) {
  Require(config.depth >= 1 && config.depth <= 6, ErrorCode::kConfig,
          "denoiser depth must be in [1, 6], got " + std::to_string(config.depth));
  Require(config.base_channels >= 8, ErrorCode::kConfig,
          "denoiser base_channels must be >= 8, got " + std::to_string(config.base_channels));
  Require(config.channels == 3, ErrorCode::kConfig, "denoiser operates on 3-channel frames");
}

const char* RoleName(ExposureRole role) { return role == ExposureRole::kLow ? "low" : "high"; }

ExposureRole ParseRole(const std::string& name) {
  if (name == "low") return ExposureRole::kLow;
  if (name == "high") return ExposureRole::kHigh;
  Fail(ErrorCode::kParse, "unknown exposure role '" + name + "'");
}

ExposureRole RoleForExposureIndex(int exposure_index) {
  Require(exposure_index >= 0, ErrorCode::kInvalidArgument, "negative exposure index");
  return exposure_index % 2 == 0 ? ExposureRole::kLow : ExposureRole::kHigh;
}

DenoiserLossKind ParseLossKind(const std::string& name) {
  if (name == "l1") return DenoiserLossKind::kL1;
  if (name == "l2") return DenoiserLossKind::kL2;
  Fail(ErrorCode::kConfig, "denoiser loss must be l1 or l2, got '" + name + "'");
}

const char* LossKindName(DenoiserLossKind kind) {
  return kind == DenoiserLossKind::kL1 ? "l1" : "l2";
}

template <typename T>
DenoiserModel<T>::DenoiserModel(const DenoiserConfig& config, ExposureRole role, uint64_t seed)
    : config_(config), role_(role) {
  Validate(config);
  Rng rng(DeriveSeed(seed, RoleName(role)));
  const int b = config.base_channels;
  int cin = config.channels;
  for (int k = 0; k < config.depth; ++k) {
    const int cout = b << k;
    down_.push_back({nn::Conv2dLayer<T>(rng, cin, cout, 3, 1, 1), nn::BatchNormLayer<T>(cout)});
    cin = cout;
  }
  bottleneck_ = {nn::Conv2dLayer<T>(rng, cin, b << config.depth, 3, 1, 1),
                 nn::BatchNormLayer<T>(b << config.depth)};
  for (int k = config.depth - 1; k >= 0; --k) {
    const int c = b << k;
    up_.push_back({nn::ConvTranspose2dLayer<T>(rng, 2 * c, c, 2, 2, 0),
                   nn::Conv2dLayer<T>(rng, 2 * c, c, 3, 1, 1), nn::BatchNormLayer<T>(c)});
  }
  head_ = nn::Conv2dLayer<T>(rng, b, config.channels, 1, 1, 0);
  // Zero residual: an untrained denoiser is the identity.
  std::fill(head_.weight.mutable_value().begin(), head_.weight.mutable_value().end(), T(0));
  std::fill(head_.bias.mutable_value().begin(), head_.bias.mutable_value().end(), T(0));

  for (size_t k = 0; k < down_.size(); ++k) {
    down_[k].conv.Collect("down" + std::to_string(k) + ".conv", state_);
    down_[k].bn.Collect("down" + std::to_string(k) + ".bn", state_);
  }
  bottleneck_.conv.Collect("bottleneck.conv", state_);
  bottleneck_.bn.Collect("bottleneck.bn", state_);
  for (size_t k = 0; k < up_.size(); ++k) {
    up_[k].up.Collect("up" + std::to_string(k) + ".deconv", state_);
    up_[k].conv.Collect("up" + std::to_string(k) + ".conv", state_);
    up_[k].bn.Collect("up" + std::to_string(k) + ".bn", state_);
  }
  head_.Collect("head", state_);
}

template <typename T>
Var<T> DenoiserModel<T>::Forward(const Var<T>& x, bool training) {
  Require(x.rank() == 4 && x.dim(1) == config_.channels, ErrorCode::kShapeMismatch,
          "denoiser expects [N, 3, H, W], got " + nn::ShapeStr(x.shape()));
  const int h = x.dim(2), w = x.dim(3);
  const int m = 1 << config_.depth;
  const int ph = (m - h % m) % m, pw = (m - w % m) % m;
  Require(ph < h && pw < w, ErrorCode::kShapeMismatch,
          "denoiser input " + std::to_string(h) + "x" + std::to_string(w) +
              " too small for reflect padding at depth " + std::to_string(config_.depth));
  Var<T> padded = (ph || pw) ? nn::ReflectPad(x, 0, ph, 0, pw) : x;

  std::vector<Var<T>> skips;
  Var<T> y = padded;
  for (auto& level : down_) {
    y = nn::Relu(level.bn(level.conv(y), training));
    skips.push_back(y);
    y = nn::MaxPool2x2(y);
  }
  y = nn::Relu(bottleneck_.bn(bottleneck_.conv(y), training));
  for (size_t k = 0; k < up_.size(); ++k) {
    auto& level = up_[k];
    y = nn::ConcatChannels<T>({level.up(y), skips[skips.size() - 1 - k]});
    y = nn::Relu(level.bn(level.conv(y), training));
  }
  Var<T> out = nn::Clamp(nn::Add(padded, head_(y)), T(0), T(1));
  return (ph || pw) ? nn::Crop(out, 0, 0, h, w) : out;
}

template class DenoiserModel<float>;
template class DenoiserModel<double>;

radiometry::LDRFrame Denoise(Denoiser& model, const radiometry::LDRFrame& noisy) {
  radiometry::Validate(noisy);
  Require(RoleForExposureIndex(noisy.exposure_index) == model.role(), ErrorCode::kInvalidArgument,
          std::string("denoise: frame with exposure index ") +
              std::to_string(noisy.exposure_index) + " given to the " + RoleName(model.role()) +
              "-exposure denoiser");
  Require(noisy.data.channels() == 3, ErrorCode::kShapeMismatch, "denoise: expected 3 channels");
  nn::NoGradGuard no_grad;
  const Raster* in[] = {&noisy.data};
  Var<float> out = model.Forward(nn::StackRasters<float>(std::span<const Raster* const>(in)), false);
  radiometry::LDRFrame result = noisy;
  result.data = nn::TensorToRaster(out, 0);
  return result;
}

template <typename T>
Var<T> DenoiserLoss(const Var<T>& pred, const Var<T>& clean, DenoiserLossKind kind) {
  return kind == DenoiserLossKind::kL1 ? nn::MeanAbsDiff(pred, clean)
                                       : nn::MeanSquaredDiff(pred, clean);
}

template Var<float> DenoiserLoss(const Var<float>&, const Var<float>&, DenoiserLossKind);
template Var<double> DenoiserLoss(const Var<double>&, const Var<double>&, DenoiserLossKind);

double DenoiserLoss(const radiometry::LDRFrame& pred, const radiometry::LDRFrame& clean,
                    DenoiserLossKind kind) {
  RequireSameShape(pred.data, clean.data, "denoiser_loss");
  double s = 0.0;
  auto a = pred.data.data(), b = clean.data.data();
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += kind == DenoiserLossKind::kL1 ? std::abs(d) : d * d;
  }
  return a.empty() ? 0.0 : s / a.size();
}

}  // namespace hdrgan::denoiser
