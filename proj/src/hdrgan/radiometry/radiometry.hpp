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

#include <cmath>
#include <cstdint>

#include "hdrgan/common/raster.hpp"

namespace hdrgan::radiometry {

inline constexpr float kDefaultGamma = 2.2f;
inline constexpr float kDefaultMu = 5000.0f;

// Non-negative linear radiance, H x W x 3.
struct LinearHDRFrame {
  Raster data;
};

// Camera-domain frame in [0,1], tagged with the exposure that produced it.
struct LDRFrame {
  Raster data;
  float exposure_time = 1.0f;
  int exposure_index = 0;
  float gamma = kDefaultGamma;
};

// mu-law compressed frame in [0,1].
struct TonemappedFrame {
  Raster data;
  float mu = kDefaultMu;
};

struct NoiseSpec {
  float mean = 0.0f;
  float sigma_lo = 0.01f;
  float sigma_hi = 0.05f;
  uint64_t seed = 0;
};

void Validate(const LinearHDRFrame& frame);
void Validate(const LDRFrame& frame);
void Validate(const TonemappedFrame& frame);
void Validate(const NoiseSpec& spec);

template <typename T>
T TonemapValue(T h, T mu) {
  return std::log1p(mu * h) / std::log1p(mu);
}

template <typename T>
T InverseTonemapValue(T t, T mu) {
  return std::expm1(t * std::log1p(mu)) / mu;
}

// clip((H * t)^(1/gamma)) into [0,1], per channel.
LDRFrame SimulateLdr(const LinearHDRFrame& hdr, float exposure_time,
                     float gamma = kDefaultGamma, int exposure_index = 0);

// L^gamma / t. Pixels clipped by SimulateLdr come back as a lower bound.
LinearHDRFrame LinearizeLdr(const LDRFrame& ldr);

struct NoiseSample {
  LDRFrame frame;
  float sigma = 0.0f;
};

// Adds i.i.d. Gaussian noise with a per-frame sigma drawn uniformly from
// [sigma_lo, sigma_hi]; the result is clamped to [0,1].
NoiseSample AddNoiseWithSigma(const LDRFrame& ldr, const NoiseSpec& spec);
LDRFrame AddNoise(const LDRFrame& ldr, const NoiseSpec& spec);

TonemappedFrame Tonemap(const LinearHDRFrame& hdr, float mu = kDefaultMu);
LinearHDRFrame InverseTonemap(const TonemappedFrame& tm);

// Divides by the dataset scale and clamps into [0,1] so the result is a valid
// tonemap input.
LinearHDRFrame NormalizeHdr(const LinearHDRFrame& hdr, float hdr_scale);
LinearHDRFrame DenormalizeHdr(const LinearHDRFrame& hdr, float hdr_scale);

// Linear-interpolated quantile over every sample of every frame.
float RadianceQuantile(std::span<const LinearHDRFrame> frames, double q);

}  // namespace hdrgan::radiometry
