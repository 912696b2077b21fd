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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "hdrgan/flowalign/flow.hpp"

namespace hdrgan::flowalign {
namespace {

Raster RandomRaster(int h, int w, int c, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Raster r(h, w, c);
  for (float& v : r.data()) v = u(rng);
  return r;
}

// Smooth textured pattern; analytic so shifts can be rendered exactly.
float Pattern(double x, double y, int c) {
  return static_cast<float>(0.5 + 0.2 * std::sin(0.31 * x + 0.7 * c) * std::cos(0.23 * y) +
                            0.15 * std::sin(0.11 * x + 0.17 * y + c));
}

Raster Render(int h, int w, double shift_x, double shift_y) {
  Raster r(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) r.at(y, x, c) = Pattern(x - shift_x, y - shift_y, c);
  return r;
}

double Psnr(const Raster& a, const Raster& b, int border) {
  double se = 0.0;
  size_t n = 0;
  for (int y = border; y < a.height() - border; ++y)
    for (int x = border; x < a.width() - border; ++x)
      for (int c = 0; c < a.channels(); ++c) {
        const double d = a.at(y, x, c) - b.at(y, x, c);
        se += d * d;
        ++n;
      }
  return 10.0 * std::log10(1.0 / std::max(se / n, 1e-20));
}

TEST(Warp, ZeroFlowIsIdentity) {
  const Raster f = RandomRaster(9, 13, 3, 1);
  EXPECT_EQ(WarpBackward(f, FlowField::Zero(9, 13)), f);
}

TEST(Warp, IntegerShiftIsExactOnInterior) {
  const Raster f = RandomRaster(12, 16, 2, 2);
  FlowField flow = FlowField::Zero(12, 16);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) {
      flow.data.at(y, x, 0) = 3.0f;
      flow.data.at(y, x, 1) = -2.0f;
    }
  const Raster out = WarpBackward(f, flow);
  for (int y = 2; y < 12; ++y)
    for (int x = 0; x < 13; ++x)
      for (int c = 0; c < 2; ++c) EXPECT_EQ(out.at(y, x, c), f.at(y - 2, x + 3, c));
}

TEST(Warp, HalfPixelMatchesClosedForm) {
  Raster f(4, 6, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) f.at(y, x, 0) = ((x + y) % 2) ? 1.0f : 0.0f;
  FlowField flow = FlowField::Zero(4, 6);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) {
      flow.data.at(y, x, 0) = 0.5f;
      flow.data.at(y, x, 1) = 0.5f;
    }
  const Raster out = WarpBackward(f, flow);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) {
      const int x1 = std::min(x + 1, 5), y1 = std::min(y + 1, 3);
      const double expected =
          0.25 * (f.at(y, x, 0) + f.at(y, x1, 0) + f.at(y1, x, 0) + f.at(y1, x1, 0));
      EXPECT_NEAR(out.at(y, x, 0), expected, 1e-6);
    }
}

TEST(Warp, LinearInFrame) {
  const Raster a = RandomRaster(10, 11, 3, 3), b = RandomRaster(10, 11, 3, 4);
  FlowField flow{RandomRaster(10, 11, 2, 5)};
  for (float& v : flow.data.data()) v = (v - 0.5f) * 6.0f;
  Raster combo(10, 11, 3);
  for (size_t i = 0; i < combo.size(); ++i) combo.data()[i] = 2.0f * a.data()[i] - 0.5f * b.data()[i];
  const Raster wa = WarpBackward(a, flow), wb = WarpBackward(b, flow), wc = WarpBackward(combo, flow);
  for (size_t i = 0; i < wc.size(); ++i)
    EXPECT_NEAR(wc.data()[i], 2.0 * wa.data()[i] - 0.5 * wb.data()[i], 1e-6);
}

TEST(Warp, RejectsMismatchedFlow) {
  EXPECT_THROW(WarpBackward(Raster(4, 4, 3), FlowField::Zero(4, 5)), Error);
}

TEST(Flow, IdenticalFramesGiveNearZeroFlow) {
  const Raster f = Render(64, 64, 0, 0);
  const FlowField flow = EstimateFlow(PyramidalFlowBackend(), f, f);
  double sum = 0.0;
  for (float v : flow.data.data()) sum += std::abs(v);
  EXPECT_LT(sum / flow.data.size(), 0.5);
}

TEST(Flow, RecoversTranslation) {
  // The neighbor is the reference moved 5 px to the right.
  const Raster ref = Render(64, 64, 0, 0), nbr = Render(64, 64, 5, 0);
  const FlowField flow = EstimateFlow(PyramidalFlowBackend(), ref, nbr);
  double dx = 0.0, dy = 0.0;
  int n = 0;
  for (int y = 12; y < 52; ++y)
    for (int x = 12; x < 52; ++x, ++n) {
      dx += flow.data.at(y, x, 0);
      dy += flow.data.at(y, x, 1);
    }
  EXPECT_NEAR(dx / n, 5.0, 0.5);
  EXPECT_NEAR(dy / n, 0.0, 0.5);
  EXPECT_GT(Psnr(WarpBackward(nbr, flow), ref, 10), 30.0);
}

TEST(Flow, BackendFactory) {
  EXPECT_EQ(MakeFlowBackend("pyramidal-lk")->name(), "pyramidal-lk");
  EXPECT_FALSE(MakeFlowBackend("zero")->trainable());
  EXPECT_THROW(MakeFlowBackend("raft"), Error);
  EXPECT_THROW(EstimateFlow(ZeroFlowBackend(), Raster(4, 4, 3), Raster(5, 4, 3)), Error);
}

radiometry::LDRFrame Expose(const Raster& radiance, float t) {
  return radiometry::SimulateLdr(radiometry::LinearHDRFrame{radiance}, t, 2.2f);
}

TEST(ExposureNormalize, MatchesReferenceBelowSaturation) {
  Raster radiance = Render(16, 16, 0, 0);
  for (float& v : radiance.data()) v *= 0.9f;
  const auto lo = Expose(radiance, 1.0f / 8), hi = Expose(radiance, 1.0f);
  auto [ref, nbr] = ExposureNormalize(lo, hi);
  for (size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(ref.data()[i], lo.data.data()[i], 1e-5);
    EXPECT_NEAR(nbr.data()[i], lo.data.data()[i], 1e-5);
  }
}

TEST(ExposureNormalize, ClipsToSharedCeiling) {
  // Radiance 4 saturates the long exposure; both sides must agree after normalization.
  Raster radiance(2, 2, 3, 4.0f);
  const auto lo = Expose(radiance, 1.0f / 8), hi = Expose(radiance, 1.0f);
  auto [ref, nbr] = ExposureNormalize(lo, hi);
  const float expected = std::pow(1.0f / 8, 1.0f / 2.2f);
  for (size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(ref.data()[i], expected, 1e-5);
    EXPECT_NEAR(nbr.data()[i], expected, 1e-5);
  }
  EXPECT_THROW(ExposureNormalize(lo, lo), Error);
}

TEST(Align, StaticSceneAndShift) {
  const Raster base = Render(64, 64, 0, 0);
  const auto ref = Expose(base, 1.0f / 8);
  const auto same = Expose(base, 1.0f);
  const PyramidalFlowBackend backend;
  const auto aligned_static = AlignNeighbor(backend, ref, same);
  EXPECT_GT(Psnr(aligned_static.aligned.data, same.data, 10), 40.0);

  const auto moved = Expose(Render(64, 64, 3, 2), 1.0f);
  const auto aligned = AlignNeighbor(backend, ref, moved);
  EXPECT_GT(Psnr(aligned.aligned.data, same.data, 10), 30.0);
  EXPECT_EQ(aligned.aligned.exposure_time, 1.0f);
}

TEST(FlowFile, RoundTrip) {
  FlowField flow{RandomRaster(5, 7, 2, 9)};
  const auto path = std::filesystem::temp_directory_path() / "hdrgan_test.flo";
  WriteFlowFile(path, flow);
  EXPECT_EQ(ReadFlowFile(path).data, flow.data);
  std::filesystem::resize_file(path, 20);
  EXPECT_THROW(ReadFlowFile(path), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hdrgan::flowalign
