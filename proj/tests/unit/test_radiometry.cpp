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
#include <vector>

#include "hdrgan/radiometry/image_io.hpp"
#include "hdrgan/radiometry/radiometry.hpp"

namespace hdrgan::radiometry {
namespace {

LinearHDRFrame Constant(float v, int h = 4, int w = 4) { return {Raster(h, w, 3, v)}; }

LinearHDRFrame RandomHdr(int h, int w, float lo, float hi, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  LinearHDRFrame f{Raster(h, w, 3)};
  for (float& v : f.data.data()) v = u(rng);
  return f;
}

TEST(SimulateLdr, ClosedForm) {
  EXPECT_FLOAT_EQ(SimulateLdr(Constant(1.0f), 1.0f).data.at(0, 0, 0), 1.0f);
  EXPECT_FLOAT_EQ(SimulateLdr(Constant(2.0f), 1.0f).data.at(0, 0, 0), 1.0f);
  EXPECT_NEAR(SimulateLdr(Constant(0.25f), 1.0f).data.at(0, 0, 0), 0.5325205447, 1e-6);
  EXPECT_NEAR(SimulateLdr(Constant(0.25f), 2.0f).data.at(0, 0, 0), std::pow(0.5, 1 / 2.2), 1e-6);
  const auto f = SimulateLdr(Constant(0.1f), 8.0f, 2.2f, 1);
  EXPECT_EQ(f.exposure_index, 1);
  EXPECT_EQ(f.exposure_time, 8.0f);
}

TEST(SimulateLdr, RejectsBadParameters) {
  EXPECT_THROW(SimulateLdr(Constant(0.5f), 0.0f), Error);
  EXPECT_THROW(SimulateLdr(Constant(0.5f), 1.0f, -1.0f), Error);
  EXPECT_THROW(SimulateLdr(Constant(-0.5f), 1.0f), Error);
}

TEST(SimulateLdr, RoundTripOnUnclippedValues) {
  const auto h = RandomHdr(16, 16, 0.0f, 0.12f, 1);
  const auto back = LinearizeLdr(SimulateLdr(h, 8.0f));
  for (size_t i = 0; i < h.data.size(); ++i) EXPECT_NEAR(back.data.data()[i], h.data.data()[i], 1e-6);
  EXPECT_FLOAT_EQ(LinearizeLdr(SimulateLdr(Constant(0.0f), 3.0f)).data.at(0, 0, 0), 0.0f);
}

TEST(SimulateLdr, ClippingIsIdempotent) {
  const auto h = RandomHdr(8, 8, 0.0f, 3.0f, 2);
  const auto once = SimulateLdr(h, 1.0f);
  const auto twice = SimulateLdr(LinearizeLdr(once), 1.0f);
  for (size_t i = 0; i < once.data.size(); ++i)
    EXPECT_NEAR(twice.data.data()[i], once.data.data()[i], 1e-6);
}

TEST(AddNoise, ZeroSigmaIsIdentity) {
  const auto l = SimulateLdr(RandomHdr(8, 8, 0.0f, 1.0f, 3), 1.0f);
  EXPECT_EQ(AddNoise(l, {0.0f, 0.0f, 0.0f, 9}).data, l.data);
}

TEST(AddNoise, DeterministicUnderSeed) {
  const auto l = SimulateLdr(RandomHdr(8, 8, 0.0f, 1.0f, 3), 1.0f);
  const NoiseSpec spec{0.0f, 0.01f, 0.05f, 42};
  EXPECT_EQ(AddNoise(l, spec).data, AddNoise(l, spec).data);
  EXPECT_NE(AddNoise(l, spec).data, AddNoise(l, {0.0f, 0.01f, 0.05f, 43}).data);
}

TEST(AddNoise, SampleDeviationMatchesSigma) {
  LDRFrame l{Raster(128, 128, 3, 0.5f)};
  const auto noisy = AddNoiseWithSigma(l, {0.0f, 0.03f, 0.03f, 5});
  EXPECT_FLOAT_EQ(noisy.sigma, 0.03f);
  double s = 0.0, s2 = 0.0;
  const size_t n = l.data.size();
  for (size_t i = 0; i < n; ++i) {
    const double d = noisy.frame.data.data()[i] - 0.5;
    s += d;
    s2 += d * d;
  }
  const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
  EXPECT_NEAR(sd, 0.03, 0.003);
  EXPECT_THROW(AddNoise(l, {0.0f, 0.05f, 0.01f, 1}), Error);
}

TEST(Tonemap, EndpointsAndClosedForm) {
  EXPECT_EQ(Tonemap(Constant(0.0f)).data.at(0, 0, 0), 0.0f);
  EXPECT_NEAR(Tonemap(Constant(1.0f)).data.at(0, 0, 0), 1.0f, 1e-7);
  EXPECT_NEAR(Tonemap(Constant(0.5f)).data.at(0, 0, 0), std::log(2501.0) / std::log(5001.0), 1e-6);
  EXPECT_NEAR(Tonemap(Constant(0.5f)).data.at(0, 0, 0), 0.9186, 1e-4);
  EXPECT_THROW(Tonemap(Constant(0.5f), 0.0f), Error);
}

TEST(Tonemap, StrictlyMonotone) {
  for (double mu : {0.5, 10.0, 5000.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = TonemapValue(i / 1000.0, mu);
      EXPECT_GT(t, prev);
      prev = t;
    }
  }
}

TEST(Tonemap, RoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  TonemappedFrame t{Raster(32, 32, 3)};
  for (float& v : t.data.data()) v = u(rng);
  const auto back = Tonemap(InverseTonemap(t));
  double worst = 0.0;
  for (size_t i = 0; i < t.data.size(); ++i)
    worst = std::max(worst, std::abs(static_cast<double>(back.data.data()[i]) - t.data.data()[i]));
  EXPECT_LT(worst, 1e-6);
  EXPECT_EQ(InverseTonemap({Raster(1, 1, 3, 0.0f)}).data.at(0, 0, 0), 0.0f);
  EXPECT_NEAR(InverseTonemap({Raster(1, 1, 3, 1.0f)}).data.at(0, 0, 0), 1.0f, 1e-6);
}

TEST(Normalization, ScaleAndQuantile) {
  const auto n = NormalizeHdr(Constant(3.0f), 2.0f);
  EXPECT_EQ(n.data.at(0, 0, 0), 1.0f);
  EXPECT_EQ(NormalizeHdr(Constant(1.0f), 2.0f).data.at(0, 0, 0), 0.5f);
  EXPECT_EQ(DenormalizeHdr(Constant(0.5f), 2.0f).data.at(0, 0, 0), 1.0f);
  std::vector<LinearHDRFrame> frames{LinearHDRFrame{Raster(1, 101, 1)}};
  for (int i = 0; i <= 100; ++i) frames[0].data.at(0, i, 0) = static_cast<float>(i);
  EXPECT_NEAR(RadianceQuantile(frames, 0.999), 99.9, 1e-4);
  EXPECT_NEAR(RadianceQuantile(frames, 0.5), 50.0, 1e-6);
}

TEST(ImageIo, ExrAndHdrRoundTrip) {
  const auto h = RandomHdr(7, 9, 0.0f, 40.0f, 6);
  const auto dir = std::filesystem::temp_directory_path();
  WriteHdrFrame(dir / "hdrgan_rt.exr", h);
  EXPECT_EQ(ReadHdrFrame(dir / "hdrgan_rt.exr").data, h.data);
  WriteHdrFrame(dir / "hdrgan_rt.hdr", h);
  const auto rgbe = ReadHdrFrame(dir / "hdrgan_rt.hdr");
  for (size_t i = 0; i < h.data.size(); ++i)
    EXPECT_NEAR(rgbe.data.data()[i], h.data.data()[i], 0.01 * 40.0);
  EXPECT_TRUE(IsHdrFrameFile("a/b.EXR"));
  EXPECT_FALSE(IsHdrFrameFile("a/b.png"));
  EXPECT_THROW(ReadHdrFrame(dir / "does_not_exist.exr"), Error);
}

TEST(ImageIo, Png16RoundTrip) {
  Raster r(5, 6, 3);
  for (size_t i = 0; i < r.size(); ++i) r.data()[i] = static_cast<float>(i % 17) / 16.0f;
  const auto path = std::filesystem::temp_directory_path() / "hdrgan_rt.png";
  WritePng16(path, r);
  const auto back = ReadPng16(path);
  for (size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(back.data()[i], r.data()[i], 1.0 / 65535);
}

}  // namespace
}  // namespace hdrgan::radiometry
