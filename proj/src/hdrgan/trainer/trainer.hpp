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

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hdrgan/dataio/dataset.hpp"
#include "hdrgan/denoiser/denoiser.hpp"
#include "hdrgan/flowalign/flow.hpp"
#include "hdrgan/metrics/metrics.hpp"
#include "hdrgan/networks/networks.hpp"
#include "hdrgan/trainer/config.hpp"

namespace hdrgan::trainer {

inline constexpr const char* kDenoiserSchema = "hdrgan.denoiser/1";
inline constexpr const char* kGanSchema = "hdrgan.gan/1";
inline constexpr const char* kPredictionSchema = "hdrgan.prediction/1";
inline constexpr const char* kLowDenoiserFile = "denoiser_low.ckpt";
inline constexpr const char* kHighDenoiserFile = "denoiser_high.ckpt";
inline constexpr const char* kGanFile = "gan.ckpt";

// FNV-1a over every parameter and buffer value in registration order.
std::string StateDigest(const nn::StateRefs<float>& refs);

// Append-only JSON-lines event stream; each record gets a "time" field.
class EventLog {
 public:
  EventLog() = default;  // discards events
  explicit EventLog(const std::filesystem::path& path);
  void Write(nlohmann::json event);
  void set_echo(std::function<void(const nlohmann::json&)> echo) { echo_ = std::move(echo); }

 private:
  std::ofstream out_;
  std::function<void(const nlohmann::json&)> echo_;
};

void SaveDenoiser(const std::filesystem::path& path, denoiser::Denoiser& model,
                  const TrainConfig& config);
std::unique_ptr<denoiser::Denoiser> LoadDenoiser(const std::filesystem::path& path);

struct DenoiserPair {
  std::unique_ptr<denoiser::Denoiser> low;
  std::unique_ptr<denoiser::Denoiser> high;

  denoiser::Denoiser& ForExposureIndex(int exposure_index);
  std::string digest() const;
};

DenoiserPair LoadDenoisers(const std::filesystem::path& dir);

struct DenoiserTrainResult {
  std::filesystem::path low_path;
  std::filesystem::path high_path;
  std::vector<double> low_curve;  // mean training loss per epoch
  std::vector<double> high_curve;
};

// Trains the two exposure-specific denoisers independently. Every iteration
// draws fresh noise for its clean patches.
DenoiserTrainResult TrainDenoisers(const TrainConfig& config, const dataio::DatasetManifest& manifest,
                                   const std::filesystem::path& out_dir, EventLog& log);

// Denoise, align and pack generator inputs for a whole sequence.
struct PreparedFrame {
  radiometry::LDRFrame denoised;
  Raster input;               // 12 channels
  flowalign::FlowField flow;  // aligns frame i-1 to frame i; zero for frame 0
};

struct Pipeline {
  DenoiserPair denoisers;  // empty when the denoisers are bypassed
  std::unique_ptr<flowalign::FlowBackend> flow;

  bool uses_denoiser() const { return denoisers.low != nullptr; }
};

// Frame 0 has no predecessor and is paired with itself under zero flow.
std::vector<PreparedFrame> PrepareSequence(Pipeline& pipeline,
                                           const std::vector<radiometry::LDRFrame>& frames);

struct StepRecord {
  long long step = 0;  // 1-based after the step completes
  int stage = 1;
  int epoch = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double adv = 0.0;
  double content = 0.0;
  double style = 0.0;
  double l1 = 0.0;
  double reg = 0.0;  // stage 2 only
};

// Stage 1 minimizes the reconstruction loss, stage 2 the total loss. Each
// batch runs one discriminator step then one generator step. Denoisers and
// flow are frozen, so generator inputs are computed once per training unit.
class GanTrainer {
 public:
  GanTrainer(const TrainConfig& config, const dataio::DatasetManifest& manifest,
             const std::filesystem::path& denoiser_dir, EventLog& log);
  ~GanTrainer();
  GanTrainer(const GanTrainer&) = delete;
  GanTrainer& operator=(const GanTrainer&) = delete;

  bool done() const;
  StepRecord Step();

  void Save(const std::filesystem::path& path);
  void Load(const std::filesystem::path& path);
  // Where a diagnostic checkpoint goes when a loss turns non-finite.
  void set_snapshot_path(const std::filesystem::path& path);

  // Mean tonemapped PSNR of the current generator on the cached units.
  double TrainingPsnr();

  long long step() const;
  int stage() const;
  size_t unit_count() const;
  std::string denoiser_digest() const;
  networks::Generator& generator();
  networks::Discriminator& discriminator();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct GanTrainOptions {
  std::filesystem::path denoiser_dir;
  std::filesystem::path out_dir;  // receives gan.ckpt and periodic checkpoints
  std::optional<std::filesystem::path> resume;
  long long stop_after_steps = 0;  // 0: run to completion
};

struct GanTrainResult {
  std::filesystem::path checkpoint;
  long long steps = 0;
  long long stage2_first_step = -1;
  std::string denoiser_digest_before;
  std::string denoiser_digest_after;
  std::vector<StepRecord> history;
};

GanTrainResult TrainGan(const TrainConfig& config, const dataio::DatasetManifest& manifest,
                        const GanTrainOptions& options, EventLog& log);

// Generator, denoisers and the flow backend restored from a GAN checkpoint.
struct TrainedModel {
  TrainConfig config;
  Pipeline pipeline;
  std::unique_ptr<networks::Generator> generator;
};

TrainedModel LoadTrainedModel(const std::filesystem::path& checkpoint);

// One tonemapped output per input frame; frame 0 uses the fallback pairing.
std::vector<radiometry::TonemappedFrame> InferFrames(TrainedModel& model,
                                                     const std::vector<radiometry::LDRFrame>& frames);

struct InferResult {
  std::filesystem::path index;  // prediction.json
  std::vector<std::filesystem::path> frames;
  int fallback_frames = 0;
};

// Writes hdr_NNNN.exr in the sequence's radiance units plus prediction.json.
InferResult InferVideo(const std::filesystem::path& checkpoint,
                       const std::filesystem::path& sequence_index,
                       const std::filesystem::path& out_dir, EventLog& log);

// Compares a prediction directory against the sequence's ground truth.
// `skip_fallback` leaves frame 0 out of the means.
metrics::EvaluationReport EvaluatePrediction(const std::filesystem::path& sequence_index,
                                             const std::filesystem::path& prediction_dir,
                                             const metrics::EvalOptions& options,
                                             bool skip_fallback = true);

struct AblationVariant {
  std::string name;
  bool use_denoiser = true;
  std::string config_hash;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  std::vector<metrics::EvaluationReport> reports;  // one per test scene
};

struct AblationReport {
  std::string shared_config_hash;  // hash without the denoiser flag
  bool add_noise = true;
  std::vector<AblationVariant> variants;  // with, then without denoiser
  double delta_psnr = 0.0;                // with minus without
  double delta_ssim = 0.0;
};

nlohmann::json AblationToJson(const AblationReport& report);

// Trains and evaluates the pipeline with and without the denoisers under the
// same seeds and budgets.
AblationReport RunAblation(const TrainConfig& config, const dataio::DatasetManifest& manifest,
                           const std::filesystem::path& work_dir, EventLog& log);

}  // namespace hdrgan::trainer
