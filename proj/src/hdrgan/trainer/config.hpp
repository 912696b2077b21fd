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

#include "hdrgan/denoiser/denoiser.hpp"
#include "hdrgan/losses/losses.hpp"
#include "hdrgan/networks/networks.hpp"
#include "json.hpp"

namespace hdrgan::trainer {

inline constexpr const char* kConfigSchema = "hdrgan.train-config/1";

struct TrainConfig {
  // Denoiser pre-training.
  int denoiser_epochs = 100;
  int denoiser_batch = 8;
  int denoiser_patch = 128;  // 0 trains on full frames
  int denoiser_patches_per_frame = 4;
  denoiser::DenoiserConfig denoiser;
  denoiser::DenoiserLossKind denoiser_loss = denoiser::DenoiserLossKind::kL1;

  // GAN: stage 1 under the reconstruction loss, stage 2 under the total loss.
  int stage1_epochs = 70;
  int stage1_batch = 20;
  int stage2_epochs = 15;
  int stage2_batch = 35;
  int gan_patch = 256;  // 0 trains on full frames
  int gan_patches_per_frame = 4;
  long long max_steps = 0;  // 0: no cap

  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;

  losses::LossWeights weights;
  bool style_weighted_content = false;
  networks::GeneratorConfig generator;
  networks::DiscriminatorConfig discriminator;
  std::string feature_extractor = "random-conv";
  losses::ContentNormalizer content_normalizer = losses::ContentNormalizer::kElements;
  std::string flow_backend = "pyramidal-lk";
  bool use_denoiser = true;
  bool add_noise = true;  // false feeds clean LDR frames everywhere

  uint64_t seed = 0;
  bool deterministic = true;
  std::string device = "cpu";
  long long checkpoint_every = 0;  // steps; 0 writes only the final checkpoint
};

void Validate(const TrainConfig& c);

nlohmann::json ConfigToJson(const TrainConfig& c);
// Fields absent from `j` keep their defaults; unknown fields are errors.
TrainConfig ConfigFromJson(const nlohmann::json& j);
TrainConfig LoadConfig(const std::filesystem::path& path);
void SaveConfig(const std::filesystem::path& path, const TrainConfig& c);

// Digest of the canonical JSON form; `exclude` names top-level fields left out.
std::string ConfigHash(const TrainConfig& c, const std::vector<std::string>& exclude = {});

// Applies the device selection. Only "cpu" exists; deterministic mode pins
// BLAS to one thread.
void ApplyDevice(const TrainConfig& c);

}  // namespace hdrgan::trainer
