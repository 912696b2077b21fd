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

#include "hdrgan/trainer/config.hpp"

#include <cblas.h>

#include <fstream>
#include <set>

#include "hdrgan/common/rng.hpp"

namespace hdrgan::trainer {

using nlohmann::json;

void Validate(const TrainConfig& c) {
  auto non_negative = [](long long v, const char* name) {
    Require(v >= 0, ErrorCode::kConfig, std::string(name) + " must be >= 0, got " + std::to_string(v));
  };
  auto positive = [](long long v, const char* name) {
    Require(v >= 1, ErrorCode::kConfig, std::string(name) + " must be >= 1, got " + std::to_string(v));
  };
  non_negative(c.denoiser_epochs, "denoiser_epochs");
  non_negative(c.stage1_epochs, "stage1_epochs");
  non_negative(c.stage2_epochs, "stage2_epochs");
  non_negative(c.max_steps, "max_steps");
  non_negative(c.checkpoint_every, "checkpoint_every");
  positive(c.denoiser_batch, "denoiser_batch");
  positive(c.stage1_batch, "stage1_batch");
  positive(c.stage2_batch, "stage2_batch");
  positive(c.denoiser_patches_per_frame, "denoiser_patches_per_frame");
  positive(c.gan_patches_per_frame, "gan_patches_per_frame");
  Require(c.denoiser_patch == 0 || c.denoiser_patch >= 16, ErrorCode::kConfig,
          "denoiser_patch must be 0 or >= 16");
  Require(c.gan_patch == 0 || c.gan_patch >= 32, ErrorCode::kConfig, "gan_patch must be 0 or >= 32");
  Require(c.learning_rate > 0.0, ErrorCode::kConfig, "learning_rate must be > 0");
  Require(c.beta1 >= 0.0 && c.beta1 < 1.0 && c.beta2 >= 0.0 && c.beta2 < 1.0, ErrorCode::kConfig,
          "Adam betas must be in [0, 1)");
  losses::Validate(c.weights);
  denoiser::Validate(c.denoiser);
  networks::Validate(c.generator);
  networks::Validate(c.discriminator);
  Require(c.device == "cpu", ErrorCode::kConfig,
          "device '" + c.device + "' is not available; this build supports 'cpu'");
}

json ConfigToJson(const TrainConfig& c) {
  return {
      {"schema", kConfigSchema},
      {"denoiser_epochs", c.denoiser_epochs},
      {"denoiser_batch", c.denoiser_batch},
      {"denoiser_patch", c.denoiser_patch},
      {"denoiser_patches_per_frame", c.denoiser_patches_per_frame},
      {"denoiser",
       {{"depth", c.denoiser.depth}, {"base_channels", c.denoiser.base_channels}, {"channels", c.denoiser.channels}}},
      {"denoiser_loss", denoiser::LossKindName(c.denoiser_loss)},
      {"stage1_epochs", c.stage1_epochs},
      {"stage1_batch", c.stage1_batch},
      {"stage2_epochs", c.stage2_epochs},
      {"stage2_batch", c.stage2_batch},
      {"gan_patch", c.gan_patch},
      {"gan_patches_per_frame", c.gan_patches_per_frame},
      {"max_steps", c.max_steps},
      {"learning_rate", c.learning_rate},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"weights",
       {{"adv", c.weights.lambda_adv}, {"content", c.weights.lambda_content}, {"style", c.weights.lambda_style},
        {"l1", c.weights.lambda_l1}, {"alpha", c.weights.alpha}}},
      {"style_weighted_content", c.style_weighted_content},
      {"generator",
       {{"input_channels", c.generator.input_channels}, {"base_channels", c.generator.base_channels},
        {"n_resblocks", c.generator.n_resblocks}, {"output_channels", c.generator.output_channels},
        {"norm_scope", networks::NormScopeName(c.generator.norm_scope)}}},
      {"discriminator",
       {{"n_conv_layers", c.discriminator.n_conv_layers}, {"n_dense_layers", c.discriminator.n_dense_layers},
        {"base_channels", c.discriminator.base_channels}, {"leaky_slope", c.discriminator.leaky_slope},
        {"head", networks::HeadName(c.discriminator.head)}}},
      {"feature_extractor", c.feature_extractor},
      {"content_normalizer", losses::ContentNormalizerName(c.content_normalizer)},
      {"flow_backend", c.flow_backend},
      {"use_denoiser", c.use_denoiser},
      {"add_noise", c.add_noise},
      {"seed", c.seed},
      {"deterministic", c.deterministic},
      {"device", c.device},
      {"checkpoint_every", c.checkpoint_every},
  };
}

namespace {

// Reads known keys from an object and rejects anything else.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    Require(j.is_object(), ErrorCode::kConfig, "config field '" + Where() + "': expected an object");
  }
  template <typename V>
  void Read(const char* key, V& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      const json& v = j_.at(key);
      if constexpr (std::is_same_v<V, bool>) {
        Require(v.is_boolean(), ErrorCode::kConfig, "config field '" + Join(key) + "': expected a boolean");
      } else if constexpr (std::is_arithmetic_v<V>) {
        Require(v.is_number(), ErrorCode::kConfig, "config field '" + Join(key) + "': expected a number");
        if constexpr (std::is_integral_v<V>)
          Require(v.is_number_integer(), ErrorCode::kConfig,
                  "config field '" + Join(key) + "': expected an integer");
      } else {
        Require(v.is_string(), ErrorCode::kConfig, "config field '" + Join(key) + "': expected a string");
      }
      out = v.get<V>();
    } catch (const json::exception& e) {
      Fail(ErrorCode::kConfig, "config field '" + Join(key) + "': " + e.what());
    }
  }
  const json* Child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string Join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void Finish() const {
    for (const auto& [key, value] : j_.items())
      Require(seen_.count(key) > 0, ErrorCode::kConfig, "unknown config field '" + Join(key) + "'");
  }

 private:
  std::string Where() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

TrainConfig ConfigFromJson(const json& j) {
  TrainConfig c;
  Reader r(j, "");
  std::string schema = kConfigSchema;
  r.Read("schema", schema);
  Require(schema == kConfigSchema, ErrorCode::kConfig,
          "config schema '" + schema + "' is not supported (expected " + kConfigSchema + ")");
  r.Read("denoiser_epochs", c.denoiser_epochs);
  r.Read("denoiser_batch", c.denoiser_batch);
  r.Read("denoiser_patch", c.denoiser_patch);
  r.Read("denoiser_patches_per_frame", c.denoiser_patches_per_frame);
  if (const json* d = r.Child("denoiser")) {
    Reader s(*d, "denoiser");
    s.Read("depth", c.denoiser.depth);
    s.Read("base_channels", c.denoiser.base_channels);
    s.Read("channels", c.denoiser.channels);
    s.Finish();
  }
  std::string loss = denoiser::LossKindName(c.denoiser_loss);
  r.Read("denoiser_loss", loss);
  c.denoiser_loss = denoiser::ParseLossKind(loss);
  r.Read("stage1_epochs", c.stage1_epochs);
  r.Read("stage1_batch", c.stage1_batch);
  r.Read("stage2_epochs", c.stage2_epochs);
  r.Read("stage2_batch", c.stage2_batch);
  r.Read("gan_patch", c.gan_patch);
  r.Read("gan_patches_per_frame", c.gan_patches_per_frame);
  r.Read("max_steps", c.max_steps);
  r.Read("learning_rate", c.learning_rate);
  r.Read("beta1", c.beta1);
  r.Read("beta2", c.beta2);
  if (const json* w = r.Child("weights")) {
    Reader s(*w, "weights");
    s.Read("adv", c.weights.lambda_adv);
    s.Read("content", c.weights.lambda_content);
    s.Read("style", c.weights.lambda_style);
    s.Read("l1", c.weights.lambda_l1);
    s.Read("alpha", c.weights.alpha);
    s.Finish();
  }
  r.Read("style_weighted_content", c.style_weighted_content);
  if (const json* g = r.Child("generator")) {
    Reader s(*g, "generator");
    s.Read("input_channels", c.generator.input_channels);
    s.Read("base_channels", c.generator.base_channels);
    s.Read("n_resblocks", c.generator.n_resblocks);
    s.Read("output_channels", c.generator.output_channels);
    std::string scope = networks::NormScopeName(c.generator.norm_scope);
    s.Read("norm_scope", scope);
    c.generator.norm_scope = networks::ParseNormScope(scope);
    s.Finish();
  }
  if (const json* d = r.Child("discriminator")) {
    Reader s(*d, "discriminator");
    s.Read("n_conv_layers", c.discriminator.n_conv_layers);
    s.Read("n_dense_layers", c.discriminator.n_dense_layers);
    s.Read("base_channels", c.discriminator.base_channels);
    s.Read("leaky_slope", c.discriminator.leaky_slope);
    std::string head = networks::HeadName(c.discriminator.head);
    s.Read("head", head);
    c.discriminator.head = networks::ParseHead(head);
    s.Finish();
  }
  r.Read("feature_extractor", c.feature_extractor);
  std::string norm = losses::ContentNormalizerName(c.content_normalizer);
  r.Read("content_normalizer", norm);
  c.content_normalizer = losses::ParseContentNormalizer(norm);
  r.Read("flow_backend", c.flow_backend);
  r.Read("use_denoiser", c.use_denoiser);
  r.Read("add_noise", c.add_noise);
  r.Read("seed", c.seed);
  r.Read("deterministic", c.deterministic);
  r.Read("device", c.device);
  r.Read("checkpoint_every", c.checkpoint_every);
  r.Finish();
  Validate(c);
  return c;
}

TrainConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, "config '" + path.string() + "': " + e.what());
  }
  try {
    return ConfigFromJson(j);
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

void SaveConfig(const std::filesystem::path& path, const TrainConfig& c) {
  std::ofstream out(path, std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write config '" + path.string() + "'");
  out << ConfigToJson(c).dump(2) << "\n";
}

std::string ConfigHash(const TrainConfig& c, const std::vector<std::string>& exclude) {
  json j = ConfigToJson(c);
  for (const auto& key : exclude) j.erase(key);
  return HexDigest(Fnv1a(j.dump()));
}

void ApplyDevice(const TrainConfig& c) {
  Validate(c);
  if (c.deterministic) openblas_set_num_threads(1);
}

}  // namespace hdrgan::trainer
