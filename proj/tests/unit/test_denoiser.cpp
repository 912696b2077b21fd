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
#include <random>

#include "hdrgan/denoiser/denoiser.hpp"
#include "hdrgan/nn/bridge.hpp"
#include "hdrgan/nn/optim.hpp"

namespace hdrgan::denoiser {
namespace {

// Layer table written out independently of the model code.
size_t ExpectedParameters(int depth, int base) {
  auto conv = [](size_t cin, size_t cout, size_t k) { return cin * cout * k * k + cout; };
  size_t n = 0;
  size_t cin = 3;
  for (int k = 0; k < depth; ++k) {
    const size_t c = static_cast<size_t>(base) << k;
    n += conv(cin, c, 3) + 2 * c;
    cin = c;
  }
  n += conv(cin, 2 * cin, 3) + 2 * (2 * cin);
  for (int k = depth - 1; k >= 0; --k) {
    const size_t c = static_cast<size_t>(base) << k;
    n += conv(2 * c, c, 2);      // transposed conv weight [2c, c, 2, 2] + bias c
    n += conv(2 * c, c, 3) + 2 * c;
  }
  n += conv(base, 3, 1);
  return n;
}

radiometry::LDRFrame RandomFrame(int h, int w, uint64_t seed, int exposure_index = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  radiometry::LDRFrame f;
  f.data = Raster(h, w, 3);
  for (float& v : f.data.data()) v = u(rng);
  f.exposure_index = exposure_index;
  return f;
}

TEST(DenoiserBuild, ParameterCountMatchesLayerTable) {
  EXPECT_EQ(Denoiser({4, 32, 3}, ExposureRole::kLow, 1).parameter_count(), ExpectedParameters(4, 32));
  EXPECT_EQ(Denoiser({2, 8, 3}, ExposureRole::kHigh, 1).parameter_count(), ExpectedParameters(2, 8));
  // Hand-summed: depth 1, base 8.
  // enc 3->8: 224+16; bottleneck 8->16: 1168+32; deconv 16->8: 520; conv 16->8: 1160+16; head 27.
  EXPECT_EQ(Denoiser({1, 8, 3}, ExposureRole::kLow, 1).parameter_count(), 3163u);
}

TEST(DenoiserBuild, SameSeedIsIdenticalAndRolesDiffer) {
  Denoiser a({2, 8, 3}, ExposureRole::kLow, 7), b({2, 8, 3}, ExposureRole::kLow, 7);
  Denoiser c({2, 8, 3}, ExposureRole::kHigh, 7);
  EXPECT_EQ(nn::ParameterDigest(a.state()), nn::ParameterDigest(b.state()));
  EXPECT_NE(nn::ParameterDigest(a.state()), nn::ParameterDigest(c.state()));
  EXPECT_EQ(a.parameter_count(), c.parameter_count());
}

TEST(DenoiserBuild, RejectsInvalidConfig) {
  EXPECT_THROW(Denoiser({0, 32, 3}, ExposureRole::kLow, 1), Error);
  EXPECT_THROW(Denoiser({2, 4, 3}, ExposureRole::kLow, 1), Error);
}

TEST(Denoise, PreservesShapeAndRange) {
  Denoiser model({4, 8, 3}, ExposureRole::kLow, 3);
  for (auto [h, w] : {std::pair{64, 64}, std::pair{192, 320}, std::pair{37, 50}}) {
    const auto in = RandomFrame(h, w, h * w);
    const auto out = Denoise(model, in);
    ASSERT_TRUE(out.data.same_shape(in.data));
    for (float v : out.data.data()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
    }
  }
}

TEST(Denoise, RejectsRoleMismatch) {
  Denoiser model({2, 8, 3}, ExposureRole::kLow, 3);
  EXPECT_THROW(Denoise(model, RandomFrame(16, 16, 1, 1)), Error);
  EXPECT_NO_THROW(Denoise(model, RandomFrame(16, 16, 1, 2)));
}

TEST(DenoiserLossTest, MatchesOracle) {
  const auto a = RandomFrame(9, 11, 1), b = RandomFrame(9, 11, 2);
  double l1 = 0.0, l2 = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data.data()[i]) - b.data.data()[i];
    l1 += std::abs(d);
    l2 += d * d;
  }
  l1 /= a.data.size();
  l2 /= a.data.size();
  EXPECT_NEAR(DenoiserLoss(a, b), l1, 1e-7);
  EXPECT_NEAR(DenoiserLoss(a, b, DenoiserLossKind::kL2), l2, 1e-7);
  EXPECT_EQ(DenoiserLoss(a, a), 0.0);
  auto shifted = b;
  for (float& v : shifted.data.data()) v = 0.5f;
  auto up = shifted;
  for (float& v : up.data.data()) v += 0.1f;
  EXPECT_NEAR(DenoiserLoss(up, shifted), 0.1, 1e-6);

  const auto ta = nn::StackRasters<float>(std::vector<Raster>{a.data});
  const auto tb = nn::StackRasters<float>(std::vector<Raster>{b.data});
  EXPECT_NEAR(DenoiserLoss(ta, tb).item(), l1, 1e-6);
  EXPECT_THROW(DenoiserLoss(a, RandomFrame(9, 10, 1)), Error);
}

TEST(DenoiserTraining, LossDecreasesOnFixedBatch) {
  Denoiser model({2, 8, 3}, ExposureRole::kLow, 5);
  const auto clean = RandomFrame(32, 32, 11);
  auto noisy = clean;
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n(0.0f, 0.05f);
  for (float& v : noisy.data.data()) v = std::clamp(v + n(rng), 0.0f, 1.0f);
  const auto x = nn::StackRasters<float>(std::vector<Raster>{noisy.data});
  const auto y = nn::StackRasters<float>(std::vector<Raster>{clean.data});
  nn::Adam adam(model.state().params, {1e-3});
  float first = 0.0f, last = 0.0f;
  for (int step = 0; step <= 10; ++step) {
    adam.ZeroGrad();
    auto loss = DenoiserLoss(model.Forward(x, true), y);
    if (step == 0) first = loss.item();
    last = loss.item();
    loss.Backward();
    adam.Step();
  }
  EXPECT_LT(last, first);
}

}  // namespace
}  // namespace hdrgan::denoiser
