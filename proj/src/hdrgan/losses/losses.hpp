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
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hdrgan/nn/ops.hpp"

namespace hdrgan::losses {

struct LossWeights {
  double lambda_adv = 5.0;
  double lambda_content = 1.0;
  double lambda_style = 1000.0;
  double lambda_l1 = 30.0;
  double alpha = 0.3;
};

void Validate(const LossWeights& w);

inline constexpr double kLogEps = 1e-7;

// Frozen feature extractor producing activated maps, shallow to deep.
template <typename T>
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::vector<nn::Var<T>> Features(const nn::Var<T>& x) const = 0;
  virtual std::string name() const = 0;
};

template <typename T>
class IdentityExtractor final : public FeatureExtractor<T> {
 public:
  std::vector<nn::Var<T>> Features(const nn::Var<T>& x) const override { return {x}; }
  std::string name() const override { return "identity"; }
};

struct ConvSpec {
  int cin = 0;
  int cout = 0;
  int kernel = 3;
  std::vector<double> weight;  // [cout, cin, k, k]
  std::vector<double> bias;    // [cout]
};

// A stack of conv + ReLU layers. Each layer's activation is one feature map;
// 2x2 max-pooling precedes every layer after the first when `pool` is set.
template <typename T>
class ConvStackExtractor final : public FeatureExtractor<T> {
 public:
  ConvStackExtractor(std::vector<ConvSpec> layers, bool pool, std::string name);
  std::vector<nn::Var<T>> Features(const nn::Var<T>& x) const override;
  std::string name() const override { return name_; }
  const std::vector<ConvSpec>& layers() const { return specs_; }

 private:
  std::vector<ConvSpec> specs_;
  std::vector<nn::Var<T>> weights_;
  std::vector<nn::Var<T>> biases_;
  bool pool_;
  std::string name_;
};

// Seeded He-normal 1x1 layers; every map has a 1x1 receptive field.
std::vector<ConvSpec> PointwiseLayers(uint64_t seed, std::span<const int> widths = {});
// Five seeded 3x3 layers, widths 16, 32, 64, 64, 64 by default.
std::vector<ConvSpec> RandomConvLayers(uint64_t seed, std::span<const int> widths = {});
// Layers stored as "<layerK>.weight" / "<layerK>.bias" in a checkpoint file.
std::vector<ConvSpec> LoadConvLayers(const std::filesystem::path& path);

// "identity", "pointwise", "random-conv", or "file:<path>".
template <typename T>
std::unique_ptr<FeatureExtractor<T>> MakeFeatureExtractor(const std::string& spec, uint64_t seed);

enum class ContentNormalizer { kElements, kChannels };

ContentNormalizer ParseContentNormalizer(const std::string& name);
const char* ContentNormalizerName(ContentNormalizer n);

template <typename T>
nn::Var<T> L1Loss(const nn::Var<T>& gen, const nn::Var<T>& gt);

// -mean log D(real) - mean log(1 - D(fake)); inputs are probabilities.
template <typename T>
nn::Var<T> DiscriminatorLoss(const nn::Var<T>& d_real, const nn::Var<T>& d_fake,
                             T eps = T(kLogEps));

// Non-saturating: -mean log D(fake).
template <typename T>
nn::Var<T> GeneratorAdversarialLoss(const nn::Var<T>& d_fake, T eps = T(kLogEps));

// Mean over layers of ||phi(gt) - phi(gen)||_1 / N_j, averaged over the batch.
// N_j is C*H*W (kElements) or C (kChannels).
template <typename T>
nn::Var<T> ContentLoss(const FeatureExtractor<T>& extractor, const nn::Var<T>& gen,
                       const nn::Var<T>& gt, ContentNormalizer norm = ContentNormalizer::kElements);

// [N, C, C], normalized by C*H*W.
template <typename T>
nn::Var<T> GramMatrix(const nn::Var<T>& features);

// Mean over layers of ||G(gt) - G(gen)||_1, averaged over the batch.
template <typename T>
nn::Var<T> StyleLoss(const FeatureExtractor<T>& extractor, const nn::Var<T>& gen,
                     const nn::Var<T>& gt);

// sqrt(mean((cur - warp(prev, flow))^2)); flow is [N, 2, H, W] and constant.
template <typename T>
nn::Var<T> TemporalRegLoss(const nn::Var<T>& cur, const nn::Var<T>& prev, std::span<const T> flow);

template <typename T>
struct ReconstructionParts {
  nn::Var<T> adv;
  nn::Var<T> content;
  nn::Var<T> style;
  nn::Var<T> l1;
};

// lambda_adv*adv + lambda_content*content + lambda_style*style + lambda_l1*l1.
// `style_weighted_content` adds a second content term weighted by lambda_style.
template <typename T>
nn::Var<T> ReconstructionLoss(const LossWeights& w, const ReconstructionParts<T>& parts,
                              bool style_weighted_content = false);
double ReconstructionLoss(const LossWeights& w, double adv, double content, double style,
                          double l1, bool style_weighted_content = false);

template <typename T>
nn::Var<T> TotalLoss(const LossWeights& w, const nn::Var<T>& rec, const nn::Var<T>& reg);
double TotalLoss(const LossWeights& w, double rec, double reg);

}  // namespace hdrgan::losses
