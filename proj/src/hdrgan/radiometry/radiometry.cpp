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

#include "hdrgan/radiometry/radiometry.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "hdrgan/common/rng.hpp"

namespace hdrgan::radiometry {
namespace {

void RequireRgb(const Raster& r, const char* what) {
  Require(!r.empty(), ErrorCode::kInvalidArgument, std::string(what) + ": empty raster");
  Require(r.channels() == 3, ErrorCode::kInvalidArgument,
          std::string(what) + ": expected 3 channels, got " + std::to_string(r.channels()));
}

}  // namespace

void Validate(const LinearHDRFrame& frame) {
  RequireRgb(frame.data, "LinearHDRFrame");
  for (float v : frame.data.data()) {
    if (!std::isfinite(v) || v < 0.0f) {
      Fail(ErrorCode::kInvalidArgument,
           "LinearHDRFrame: values must be finite and non-negative (got " +
               std::to_string(v) + ")");
    }
  }
}

void Validate(const LDRFrame& frame) {
  RequireRgb(frame.data, "LDRFrame");
  Require(frame.exposure_time > 0.0f, ErrorCode::kInvalidArgument,
          "LDRFrame: exposure_time must be positive");
  Require(frame.gamma > 0.0f, ErrorCode::kInvalidArgument, "LDRFrame: gamma must be positive");
  for (float v : frame.data.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      Fail(ErrorCode::kInvalidArgument, "LDRFrame: values must lie in [0,1]");
    }
  }
}

void Validate(const TonemappedFrame& frame) {
  RequireRgb(frame.data, "TonemappedFrame");
  Require(frame.mu > 0.0f, ErrorCode::kInvalidArgument, "TonemappedFrame: mu must be positive");
  for (float v : frame.data.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      Fail(ErrorCode::kInvalidArgument, "TonemappedFrame: values must lie in [0,1]");
    }
  }
}

void Validate(const NoiseSpec& spec) {
  Require(std::isfinite(spec.mean), ErrorCode::kInvalidArgument, "NoiseSpec: mean not finite");
  Require(spec.sigma_lo >= 0.0f && spec.sigma_lo <= spec.sigma_hi, ErrorCode::kInvalidArgument,
          "NoiseSpec: require 0 <= sigma_lo <= sigma_hi");
}

LDRFrame SimulateLdr(const LinearHDRFrame& hdr, float exposure_time, float gamma,
                     int exposure_index) {
  Require(exposure_time > 0.0f, ErrorCode::kInvalidArgument,
          "simulate_ldr: exposure time must be positive");
  Require(gamma > 0.0f, ErrorCode::kInvalidArgument, "simulate_ldr: gamma must be positive");
  Validate(hdr);
  LDRFrame out{Raster(hdr.data.height(), hdr.data.width(), 3), exposure_time, exposure_index,
               gamma};
  const float inv_gamma = 1.0f / gamma;
  auto src = hdr.data.data();
  auto dst = out.data.data();
  for (size_t i = 0; i < src.size(); ++i) {
    dst[i] = std::clamp(std::pow(src[i] * exposure_time, inv_gamma), 0.0f, 1.0f);
  }
  return out;
}

LinearHDRFrame LinearizeLdr(const LDRFrame& ldr) {
  Validate(ldr);
  LinearHDRFrame out{Raster(ldr.data.height(), ldr.data.width(), 3)};
  auto src = ldr.data.data();
  auto dst = out.data.data();
  for (size_t i = 0; i < src.size(); ++i) {
    dst[i] = std::pow(src[i], ldr.gamma) / ldr.exposure_time;
  }
  return out;
}

NoiseSample AddNoiseWithSigma(const LDRFrame& ldr, const NoiseSpec& spec) {
  Validate(ldr);
  Validate(spec);
  Rng rng(spec.seed);
  float sigma = spec.sigma_lo;
  if (spec.sigma_hi > spec.sigma_lo) {
    sigma = std::uniform_real_distribution<float>(spec.sigma_lo, spec.sigma_hi)(rng);
  }
  NoiseSample out{ldr, sigma};
  if (sigma == 0.0f && spec.mean == 0.0f) return out;
  std::normal_distribution<float> normal(spec.mean, sigma);
  for (float& v : out.frame.data.data()) {
    v = std::clamp(v + normal(rng), 0.0f, 1.0f);
  }
  return out;
}

LDRFrame AddNoise(const LDRFrame& ldr, const NoiseSpec& spec) {
  return AddNoiseWithSigma(ldr, spec).frame;
}

TonemappedFrame Tonemap(const LinearHDRFrame& hdr, float mu) {
  Require(mu > 0.0f, ErrorCode::kInvalidArgument, "tonemap: mu must be positive");
  Validate(hdr);
  TonemappedFrame out{Raster(hdr.data.height(), hdr.data.width(), 3), mu};
  auto src = hdr.data.data();
  auto dst = out.data.data();
  const double denom = std::log1p(static_cast<double>(mu));
  for (size_t i = 0; i < src.size(); ++i) {
    Require(src[i] <= 1.0f, ErrorCode::kInvalidArgument,
            "tonemap: input must be range-normalized into [0,1]");
    dst[i] = static_cast<float>(std::log1p(static_cast<double>(mu) * src[i]) / denom);
  }
  return out;
}

LinearHDRFrame InverseTonemap(const TonemappedFrame& tm) {
  Validate(tm);
  LinearHDRFrame out{Raster(tm.data.height(), tm.data.width(), 3)};
  auto src = tm.data.data();
  auto dst = out.data.data();
  const double log_mu1 = std::log1p(static_cast<double>(tm.mu));
  for (size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<float>(std::expm1(src[i] * log_mu1) / tm.mu);
  }
  return out;
}

LinearHDRFrame NormalizeHdr(const LinearHDRFrame& hdr, float hdr_scale) {
  Require(hdr_scale > 0.0f, ErrorCode::kInvalidArgument, "hdr_scale must be positive");
  LinearHDRFrame out = hdr;
  for (float& v : out.data.data()) v = std::clamp(v / hdr_scale, 0.0f, 1.0f);
  return out;
}

LinearHDRFrame DenormalizeHdr(const LinearHDRFrame& hdr, float hdr_scale) {
  Require(hdr_scale > 0.0f, ErrorCode::kInvalidArgument, "hdr_scale must be positive");
  LinearHDRFrame out = hdr;
  for (float& v : out.data.data()) v *= hdr_scale;
  return out;
}

float RadianceQuantile(std::span<const LinearHDRFrame> frames, double q) {
  Require(q >= 0.0 && q <= 1.0, ErrorCode::kInvalidArgument, "quantile must be in [0,1]");
  std::vector<float> all;
  for (const auto& f : frames) {
    auto d = f.data.data();
    all.insert(all.end(), d.begin(), d.end());
  }
  Require(!all.empty(), ErrorCode::kInvalidArgument, "quantile of empty frame set");
  const double pos = q * static_cast<double>(all.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, all.size() - 1);
  std::nth_element(all.begin(), all.begin() + lo, all.end());
  const float vlo = all[lo];
  const float vhi = hi == lo ? vlo : *std::min_element(all.begin() + lo + 1, all.end());
  return static_cast<float>(vlo + (pos - lo) * (vhi - vlo));
}

}  // namespace hdrgan::radiometry
