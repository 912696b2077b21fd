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

#include "hdrgan/losses/losses.hpp"

#include <cmath>
#include <random>

#include "hdrgan/common/rng.hpp"
#include "hdrgan/nn/checkpoint_file.hpp"

namespace hdrgan::losses {

using nn::Var;

void Validate(const LossWeights& w) {
  Require(w.lambda_adv >= 0 && w.lambda_content >= 0 && w.lambda_style >= 0 && w.lambda_l1 >= 0,
          ErrorCode::kConfig, "loss weights must be non-negative");
  Require(w.alpha >= 0.0 && w.alpha <= 1.0, ErrorCode::kConfig, "alpha must be in [0, 1]");
}

namespace {

std::vector<ConvSpec> SeededLayers(uint64_t seed, std::span<const int> widths, int kernel,
                                   const char* tag) {
  Rng rng(DeriveSeed(seed, tag));
  std::vector<ConvSpec> layers;
  int cin = 3;
  for (int cout : widths) {
    ConvSpec s{cin, cout, kernel, {}, {}};
    const double std_dev = std::sqrt(2.0 / (cin * kernel * kernel));
    std::normal_distribution<double> normal(0.0, std_dev);
    s.weight.resize(static_cast<size_t>(cout) * cin * kernel * kernel);
    for (double& e : s.weight) e = normal(rng);
    s.bias.assign(cout, 0.0);
    layers.push_back(std::move(s));
    cin = cout;
  }
  return layers;
}

}  // namespace

std::vector<ConvSpec> PointwiseLayers(uint64_t seed, std::span<const int> widths) {
  static const int kDefault[] = {16, 16};
  return SeededLayers(seed, widths.empty() ? std::span<const int>(kDefault) : widths, 1,
                      "pointwise-extractor");
}

std::vector<ConvSpec> RandomConvLayers(uint64_t seed, std::span<const int> widths) {
  static const int kDefault[] = {16, 32, 64, 64, 64};
  return SeededLayers(seed, widths.empty() ? std::span<const int>(kDefault) : widths, 3,
                      "random-conv-extractor");
}

std::vector<ConvSpec> LoadConvLayers(const std::filesystem::path& path) {
  const nn::CheckpointFile file = nn::ReadCheckpointFile(path);
  std::vector<ConvSpec> layers;
  for (int k = 0;; ++k) {
    const auto* w = file.Find("layer" + std::to_string(k) + ".weight");
    if (!w) break;
    const auto* b = file.Find("layer" + std::to_string(k) + ".bias");
    Require(b && w->shape.size() == 4 && w->shape[2] == w->shape[3] && b->shape.size() == 1 &&
                b->shape[0] == w->shape[0],
            ErrorCode::kParse, "extractor file '" + path.string() + "': malformed layer " +
                                   std::to_string(k));
    ConvSpec s{w->shape[1], w->shape[0], w->shape[2], {w->data.begin(), w->data.end()},
               {b->data.begin(), b->data.end()}};
    Require(layers.empty() || layers.back().cout == s.cin, ErrorCode::kParse,
            "extractor file '" + path.string() + "': channel chain broken at layer " +
                std::to_string(k));
    layers.push_back(std::move(s));
  }
  Require(!layers.empty(), ErrorCode::kParse,
          "extractor file '" + path.string() + "' has no layer0.weight");
  Require(layers.front().cin == 3, ErrorCode::kParse, "extractor must take 3 input channels");
  return layers;
}

template <typename T>
ConvStackExtractor<T>::ConvStackExtractor(std::vector<ConvSpec> layers, bool pool, std::string name)
    : specs_(std::move(layers)), pool_(pool), name_(std::move(name)) {
  Require(!specs_.empty(), ErrorCode::kConfig, "feature extractor needs at least one layer");
  for (const ConvSpec& s : specs_) {
    Require(s.weight.size() == static_cast<size_t>(s.cout) * s.cin * s.kernel * s.kernel &&
                s.bias.size() == static_cast<size_t>(s.cout) && s.kernel % 2 == 1,
            ErrorCode::kConfig, "feature extractor layer has inconsistent sizes");
    weights_.push_back(Var<T>::Constant({s.cout, s.cin, s.kernel, s.kernel},
                                        std::vector<T>(s.weight.begin(), s.weight.end())));
    biases_.push_back(Var<T>::Constant({s.cout}, std::vector<T>(s.bias.begin(), s.bias.end())));
  }
}

template <typename T>
std::vector<Var<T>> ConvStackExtractor<T>::Features(const Var<T>& x) const {
  std::vector<Var<T>> out;
  Var<T> y = x;
  for (size_t i = 0; i < specs_.size(); ++i) {
    if (pool_ && i > 0 && y.dim(2) >= 2 && y.dim(3) >= 2 && y.dim(2) % 2 == 0 && y.dim(3) % 2 == 0) {
      y = nn::MaxPool2x2(y);
    }
    y = nn::Relu(nn::Conv2d(y, weights_[i], biases_[i], 1, specs_[i].kernel / 2));
    out.push_back(y);
  }
  return out;
}

template class ConvStackExtractor<float>;
template class ConvStackExtractor<double>;

template <typename T>
std::unique_ptr<FeatureExtractor<T>> MakeFeatureExtractor(const std::string& spec, uint64_t seed) {
  if (spec == "identity") return std::make_unique<IdentityExtractor<T>>();
  if (spec == "pointwise")
    return std::make_unique<ConvStackExtractor<T>>(PointwiseLayers(seed), false, spec);
  if (spec == "random-conv")
    return std::make_unique<ConvStackExtractor<T>>(RandomConvLayers(seed), true, spec);
  if (spec.rfind("file:", 0) == 0)
    return std::make_unique<ConvStackExtractor<T>>(LoadConvLayers(spec.substr(5)), true, spec);
  Fail(ErrorCode::kConfig, "unknown feature extractor '" + spec +
                               "' (expected identity, pointwise, random-conv or file:<path>)");
}

template std::unique_ptr<FeatureExtractor<float>> MakeFeatureExtractor(const std::string&, uint64_t);
template std::unique_ptr<FeatureExtractor<double>> MakeFeatureExtractor(const std::string&, uint64_t);

ContentNormalizer ParseContentNormalizer(const std::string& name) {
  if (name == "elements") return ContentNormalizer::kElements;
  if (name == "channels") return ContentNormalizer::kChannels;
  Fail(ErrorCode::kConfig, "content normalizer must be elements or channels, got '" + name + "'");
}

const char* ContentNormalizerName(ContentNormalizer n) {
  return n == ContentNormalizer::kElements ? "elements" : "channels";
}

namespace {

template <typename T>
void RequireSameDims(const Var<T>& a, const Var<T>& b, const char* what) {
  Require(a.shape() == b.shape(), ErrorCode::kShapeMismatch,
          std::string(what) + ": shape " + nn::ShapeStr(a.shape()) + " vs " + nn::ShapeStr(b.shape()));
}

}  // namespace

template <typename T>
Var<T> L1Loss(const Var<T>& gen, const Var<T>& gt) {
  RequireSameDims(gen, gt, "l1_loss");
  return nn::MeanAbsDiff(gen, gt);
}

template <typename T>
Var<T> DiscriminatorLoss(const Var<T>& d_real, const Var<T>& d_fake, T eps) {
  return nn::Scale(nn::Add(nn::MeanLogClamped(d_real, eps), nn::MeanLogOneMinusClamped(d_fake, eps)),
                   T(-1));
}

template <typename T>
Var<T> GeneratorAdversarialLoss(const Var<T>& d_fake, T eps) {
  return nn::Scale(nn::MeanLogClamped(d_fake, eps), T(-1));
}

template <typename T>
Var<T> ContentLoss(const FeatureExtractor<T>& extractor, const Var<T>& gen, const Var<T>& gt,
                   ContentNormalizer norm) {
  RequireSameDims(gen, gt, "content_loss");
  const auto fg = extractor.Features(gen);
  const auto ft = extractor.Features(gt);
  Var<T> total;
  for (size_t j = 0; j < fg.size(); ++j) {
    // MeanAbsDiff divides by N*C*H*W, i.e. the per-sample C*H*W normalizer
    // averaged over the batch.
    Var<T> term = nn::MeanAbsDiff(ft[j], fg[j]);
    if (norm == ContentNormalizer::kChannels) {
      term = nn::Scale(term, static_cast<T>(fg[j].dim(2)) * static_cast<T>(fg[j].dim(3)));
    }
    total = total.defined() ? nn::Add(total, term) : term;
  }
  return nn::Scale(total, T(1) / static_cast<T>(fg.size()));
}

template <typename T>
Var<T> GramMatrix(const Var<T>& features) {
  return nn::Gram(features);
}

template <typename T>
Var<T> StyleLoss(const FeatureExtractor<T>& extractor, const Var<T>& gen, const Var<T>& gt) {
  RequireSameDims(gen, gt, "style_loss");
  const auto fg = extractor.Features(gen);
  const auto ft = extractor.Features(gt);
  Var<T> total;
  for (size_t j = 0; j < fg.size(); ++j) {
    const T c = static_cast<T>(fg[j].dim(1));
    Var<T> term = nn::Scale(nn::MeanAbsDiff(nn::Gram(ft[j]), nn::Gram(fg[j])), c * c);
    total = total.defined() ? nn::Add(total, term) : term;
  }
  return nn::Scale(total, T(1) / static_cast<T>(fg.size()));
}

template <typename T>
Var<T> TemporalRegLoss(const Var<T>& cur, const Var<T>& prev, std::span<const T> flow) {
  RequireSameDims(cur, prev, "temporal_reg");
  return nn::SqrtScalar(nn::MeanSquaredDiff(cur, nn::WarpBackward(prev, flow)));
}

template <typename T>
Var<T> ReconstructionLoss(const LossWeights& w, const ReconstructionParts<T>& p, bool style_weighted_content) {
  Var<T> out = nn::Add(nn::Add(nn::Scale(p.adv, static_cast<T>(w.lambda_adv)),
                               nn::Scale(p.content, static_cast<T>(w.lambda_content))),
                       nn::Add(nn::Scale(p.style, static_cast<T>(w.lambda_style)),
                               nn::Scale(p.l1, static_cast<T>(w.lambda_l1))));
  if (style_weighted_content) out = nn::Add(out, nn::Scale(p.content, static_cast<T>(w.lambda_style)));
  return out;
}

double ReconstructionLoss(const LossWeights& w, double adv, double content, double style,
                          double l1, bool style_weighted_content) {
  double out = w.lambda_adv * adv + w.lambda_content * content + w.lambda_style * style +
               w.lambda_l1 * l1;
  if (style_weighted_content) out += w.lambda_style * content;
  return out;
}

template <typename T>
Var<T> TotalLoss(const LossWeights& w, const Var<T>& rec, const Var<T>& reg) {
  return nn::Add(nn::Scale(rec, static_cast<T>(w.alpha)), nn::Scale(reg, static_cast<T>(1.0 - w.alpha)));
}

double TotalLoss(const LossWeights& w, double rec, double reg) {
  return w.alpha * rec + (1.0 - w.alpha) * reg;
}

#define HDRGAN_INSTANTIATE_LOSSES(T)                                                         \
  template Var<T> L1Loss(const Var<T>&, const Var<T>&);                                      \
  template Var<T> DiscriminatorLoss(const Var<T>&, const Var<T>&, T);                        \
  template Var<T> GeneratorAdversarialLoss(const Var<T>&, T);                                \
  template Var<T> ContentLoss(const FeatureExtractor<T>&, const Var<T>&, const Var<T>&,      \
                              ContentNormalizer);                                            \
  template Var<T> GramMatrix(const Var<T>&);                                                 \
  template Var<T> StyleLoss(const FeatureExtractor<T>&, const Var<T>&, const Var<T>&);       \
  template Var<T> TemporalRegLoss(const Var<T>&, const Var<T>&, std::span<const T>);         \
  template Var<T> ReconstructionLoss(const LossWeights&, const ReconstructionParts<T>&, bool); \
  template Var<T> TotalLoss(const LossWeights&, const Var<T>&, const Var<T>&);

HDRGAN_INSTANTIATE_LOSSES(float)
HDRGAN_INSTANTIATE_LOSSES(double)

#undef HDRGAN_INSTANTIATE_LOSSES

}  // namespace hdrgan::losses
