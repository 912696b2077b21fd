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

#include "hdrgan/trainer/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "hdrgan/common/rng.hpp"
#include "hdrgan/losses/losses.hpp"
#include "hdrgan/nn/bridge.hpp"
#include "hdrgan/nn/checkpoint_file.hpp"
#include "hdrgan/nn/optim.hpp"
#include "hdrgan/radiometry/image_io.hpp"

namespace hdrgan::trainer {

namespace fs = std::filesystem;
using nlohmann::json;
using nn::Var;
using radiometry::LDRFrame;

namespace {

// Config fields that may change between a run and its resumption.
const std::vector<std::string> kResumableFields = {"max_steps", "checkpoint_every", "stage2_epochs"};

std::string FrameName(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, i, ext);
  return buf;
}

nn::AdamOptions AdamFrom(const TrainConfig& c) {
  return {c.learning_rate, c.beta1, c.beta2, 1e-8};
}

void Shuffle(std::vector<size_t>& order, uint64_t seed) {
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle.
  for (size_t i = order.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

json DenoiserConfigJson(const denoiser::DenoiserConfig& d) {
  return {{"depth", d.depth}, {"base_channels", d.base_channels}, {"channels", d.channels}};
}

// Largest square patch every frame can hold, capped at `requested`.
int EffectivePatch(int requested, int min_side) {
  return requested == 0 ? 0 : std::min(requested, min_side);
}

}  // namespace

std::string StateDigest(const nn::StateRefs<float>& refs) {
  uint64_t h = nn::ParameterDigest(refs);
  for (const auto& b : refs.buffers) {
    h = Fnv1a(b.name, h);
    h = Fnv1a(std::span(reinterpret_cast<const unsigned char*>(b.data->data()), b.data->size() * sizeof(float)),
              h);
  }
  return HexDigest(h);
}

EventLog::EventLog(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path, std::ios::app);
  Require(static_cast<bool>(out_), ErrorCode::kIo, "cannot open log '" + path.string() + "'");
}

void EventLog::Write(json event) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  event["time"] = std::chrono::duration<double>(now).count();
  if (out_.is_open()) {
    out_ << event.dump() << "\n";
    out_.flush();
  }
  if (echo_) echo_(event);
}

// ---------------------------------------------------------------- denoisers

void SaveDenoiser(const fs::path& path, denoiser::Denoiser& model, const TrainConfig& config) {
  nn::CheckpointFile file;
  file.schema = kDenoiserSchema;
  file.metadata = {{"role", denoiser::RoleName(model.role())},
                   {"config", DenoiserConfigJson(model.config())},
                   {"loss", denoiser::LossKindName(config.denoiser_loss)},
                   {"train_config_hash", ConfigHash(config)},
                   {"digest", StateDigest(model.state())}};
  nn::ExportState(model.state(), "model.", file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  nn::WriteCheckpointFile(path, file);
}

namespace {

std::unique_ptr<denoiser::Denoiser> DenoiserFromFile(const nn::CheckpointFile& file, const std::string& prefix,
                                                     const json& meta) {
  denoiser::DenoiserConfig cfg;
  const json& c = meta.at("config");
  cfg.depth = c.at("depth").get<int>();
  cfg.base_channels = c.at("base_channels").get<int>();
  cfg.channels = c.at("channels").get<int>();
  auto model = std::make_unique<denoiser::Denoiser>(cfg, denoiser::ParseRole(meta.at("role").get<std::string>()), 0);
  nn::ImportState(file, prefix, model->state());
  return model;
}

}  // namespace

std::unique_ptr<denoiser::Denoiser> LoadDenoiser(const fs::path& path) {
  Require(fs::exists(path), ErrorCode::kIo,
          "denoiser checkpoint '" + path.string() + "' not found; run train-denoiser first");
  const auto file = nn::ReadCheckpointFile(path);
  Require(file.schema == kDenoiserSchema, ErrorCode::kParse,
          "'" + path.string() + "' is not a denoiser checkpoint (schema '" + file.schema + "')");
  try {
    return DenoiserFromFile(file, "model.", file.metadata);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "denoiser checkpoint '" + path.string() + "': " + e.what());
  }
}

denoiser::Denoiser& DenoiserPair::ForExposureIndex(int exposure_index) {
  Require(low && high, ErrorCode::kState, "denoisers are not loaded");
  return denoiser::RoleForExposureIndex(exposure_index) == denoiser::ExposureRole::kLow ? *low : *high;
}

std::string DenoiserPair::digest() const {
  if (!low || !high) return "none";
  return StateDigest(low->state()) + ":" + StateDigest(high->state());
}

DenoiserPair LoadDenoisers(const fs::path& dir) {
  DenoiserPair pair;
  pair.low = LoadDenoiser(dir / kLowDenoiserFile);
  pair.high = LoadDenoiser(dir / kHighDenoiserFile);
  Require(pair.low->role() == denoiser::ExposureRole::kLow && pair.high->role() == denoiser::ExposureRole::kHigh,
          ErrorCode::kState, "denoiser checkpoints in '" + dir.string() + "' have swapped roles");
  return pair;
}

DenoiserTrainResult TrainDenoisers(const TrainConfig& config, const dataio::DatasetManifest& manifest,
                                   const fs::path& out_dir, EventLog& log) {
  ApplyDevice(config);
  const auto train = manifest.scenes_in(dataio::Split::kTrain);
  Require(!train.empty(), ErrorCode::kConfig, "manifest has no training scenes");

  // Clean frames grouped by role.
  std::vector<LDRFrame> clean[2];
  int min_side = 1 << 30;
  for (const auto* scene : train) {
    const auto hdr = dataio::LoadSceneFrames(manifest, *scene);
    for (int i = 0; i < static_cast<int>(hdr.size()); ++i) {
      auto ldr = dataio::CleanLdr(manifest, hdr[i], i);
      min_side = std::min({min_side, ldr.data.height(), ldr.data.width()});
      const int role = static_cast<int>(denoiser::RoleForExposureIndex(ldr.exposure_index));
      clean[role].push_back(std::move(ldr));
    }
  }
  const int patch = EffectivePatch(config.denoiser_patch, min_side);
  if (patch != config.denoiser_patch)
    log.Write({{"event", "denoiser_patch_clamped"}, {"requested", config.denoiser_patch}, {"used", patch}});
  if (patch == 0) {
    for (const auto& group : clean)
      for (const auto& f : group)
        Require(f.data.same_shape(group.front().data), ErrorCode::kShapeMismatch,
                "full-frame denoiser training needs equal frame sizes; set denoiser_patch");
  }

  DenoiserTrainResult result;
  result.low_path = out_dir / kLowDenoiserFile;
  result.high_path = out_dir / kHighDenoiserFile;
  for (int role = 0; role < 2; ++role) {
    const auto r = static_cast<denoiser::ExposureRole>(role);
    const char* name = denoiser::RoleName(r);
    Require(!clean[role].empty(), ErrorCode::kConfig,
            std::string("training split has no ") + name + "-exposure frames");
    denoiser::Denoiser model(config.denoiser, r, DeriveSeed(config.seed, "denoiser"));
    nn::Adam opt(model.state().params, AdamFrom(config));
    const int per_frame = patch == 0 ? 1 : config.denoiser_patches_per_frame;
    const size_t n = clean[role].size() * static_cast<size_t>(per_frame);
    std::vector<size_t> order(n);
    auto& curve = role == 0 ? result.low_curve : result.high_curve;
    for (int epoch = 0; epoch < config.denoiser_epochs; ++epoch) {
      Shuffle(order, DeriveSeed(config.seed, "denoiser-order", {uint64_t(role), uint64_t(epoch)}));
      double sum = 0.0;
      int batches = 0;
      for (size_t start = 0; start < n; start += config.denoiser_batch) {
        std::vector<Raster> noisy, target;
        for (size_t k = start; k < std::min(n, start + config.denoiser_batch); ++k) {
          const size_t f = order[k] / per_frame, p = order[k] % per_frame;
          const LDRFrame& src = clean[role][f];
          const uint64_t key[] = {uint64_t(role), uint64_t(epoch), f, p};
          LDRFrame crop = src;
          if (patch > 0) {
            Rng rng(DeriveSeed(config.seed, "denoiser-patch", {key[0], key[1], key[2], key[3]}));
            const int top = std::uniform_int_distribution<int>(0, src.data.height() - patch)(rng);
            const int left = std::uniform_int_distribution<int>(0, src.data.width() - patch)(rng);
            crop.data = CropRaster(src.data, top, left, patch, patch);
          }
          radiometry::NoiseSpec spec = manifest.noise;
          spec.seed = DeriveSeed(config.seed, "denoiser-noise", {key[0], key[1], key[2], key[3]});
          noisy.push_back(radiometry::AddNoise(crop, spec).data);
          target.push_back(std::move(crop.data));
        }
        Var<float> pred = model.Forward(nn::StackRasters<float>(noisy), true);
        Var<float> loss = denoiser::DenoiserLoss(pred, nn::StackRasters<float>(target), config.denoiser_loss);
        const double value = loss.item();
        Require(std::isfinite(value), ErrorCode::kNumeric,
                std::string(name) + " denoiser loss is not finite at epoch " + std::to_string(epoch));
        opt.ZeroGrad();
        loss.Backward();
        opt.Step();
        sum += value;
        ++batches;
      }
      curve.push_back(sum / std::max(batches, 1));
      log.Write({{"event", "denoiser_epoch"}, {"role", name}, {"epoch", epoch}, {"loss", curve.back()}});
    }
    SaveDenoiser(role == 0 ? result.low_path : result.high_path, model, config);
    log.Write({{"event", "denoiser_saved"},
               {"role", name},
               {"path", (role == 0 ? result.low_path : result.high_path).string()},
               {"digest", StateDigest(model.state())}});
  }
  return result;
}

// ----------------------------------------------------------------- pipeline

std::vector<PreparedFrame> PrepareSequence(Pipeline& pipeline, const std::vector<LDRFrame>& frames) {
  Require(pipeline.flow != nullptr, ErrorCode::kState, "pipeline has no flow backend");
  std::vector<PreparedFrame> out(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    out[i].denoised = pipeline.uses_denoiser()
                          ? denoiser::Denoise(pipeline.denoisers.ForExposureIndex(frames[i].exposure_index), frames[i])
                          : frames[i];
  }
  for (size_t i = 0; i < frames.size(); ++i) {
    if (i == 0) {
      out[0].flow = flowalign::FlowField::Zero(frames[0].data.height(), frames[0].data.width());
      out[0].input = networks::GeneratorInput(out[0].denoised, out[0].denoised);
      continue;
    }
    auto aligned = flowalign::AlignNeighbor(*pipeline.flow, out[i].denoised, out[i - 1].denoised);
    out[i].input = networks::GeneratorInput(out[i].denoised, aligned.aligned);
    out[i].flow = std::move(aligned.flow);
  }
  return out;
}

// --------------------------------------------------------------------- GAN

struct GanTrainer::Impl {
  struct Unit {
    Raster in_cur, in_prev;  // 12 channels
    Raster gt_cur, gt_prev;  // tonemapped
    Raster flow;             // aligns prev to cur
    std::string scene;
    int frame = 0;
    int patch = 0;
  };

  TrainConfig config;
  dataio::DatasetManifest manifest;
  EventLog& log;
  Pipeline pipeline;
  std::unique_ptr<networks::Generator> g;
  std::unique_ptr<networks::Discriminator> d;
  std::unique_ptr<losses::FeatureExtractor<float>> features;
  std::unique_ptr<nn::Adam> opt_g, opt_d;
  std::vector<Unit> units;
  std::vector<size_t> order;
  long long step = 0;
  int epoch = 0;
  int batch_in_epoch = 0;
  long long stage2_first_step = -1;
  std::string denoiser_digest;
  fs::path snapshot_path;

  Impl(const TrainConfig& c, const dataio::DatasetManifest& m, const fs::path& denoiser_dir, EventLog& l)
      : config(c), manifest(m), log(l) {
    ApplyDevice(config);
    dataio::Validate(manifest);
    if (config.use_denoiser) pipeline.denoisers = LoadDenoisers(denoiser_dir);
    pipeline.flow = flowalign::MakeFlowBackend(config.flow_backend);
    denoiser_digest = pipeline.denoisers.digest();
    g = std::make_unique<networks::Generator>(config.generator, DeriveSeed(config.seed, "generator"));
    d = std::make_unique<networks::Discriminator>(config.discriminator, DeriveSeed(config.seed, "discriminator"));
    features = losses::MakeFeatureExtractor<float>(config.feature_extractor, DeriveSeed(config.seed, "features"));
    opt_g = std::make_unique<nn::Adam>(g->state().params, AdamFrom(config));
    opt_d = std::make_unique<nn::Adam>(d->state().params, AdamFrom(config));
    BuildUnits();
    order.resize(units.size());
    Reshuffle();
  }

  int total_epochs() const { return config.stage1_epochs + config.stage2_epochs; }
  int stage() const { return epoch < config.stage1_epochs ? 1 : 2; }
  size_t batch_size() const {
    const int b = stage() == 1 ? config.stage1_batch : config.stage2_batch;
    return std::min(units.size(), static_cast<size_t>(b));
  }
  bool done() const {
    return epoch >= total_epochs() || (config.max_steps > 0 && step >= config.max_steps);
  }
  void Reshuffle() { Shuffle(order, DeriveSeed(config.seed, "gan-order", {uint64_t(epoch)})); }

  void BuildUnits() {
    const auto train = manifest.scenes_in(dataio::Split::kTrain);
    Require(!train.empty(), ErrorCode::kConfig, "manifest has no training scenes");
    struct SceneData {
      const dataio::SceneEntry* scene;
      std::vector<radiometry::LinearHDRFrame> hdr;
    };
    std::vector<SceneData> scenes;
    int min_side = 1 << 30;
    for (const auto* s : train) {
      scenes.push_back({s, dataio::LoadSceneFrames(manifest, *s)});
      min_side = std::min({min_side, scenes.back().hdr[0].data.height(), scenes.back().hdr[0].data.width()});
    }
    const int patch = EffectivePatch(config.gan_patch, min_side);
    if (patch != config.gan_patch)
      log.Write({{"event", "gan_patch_clamped"}, {"requested", config.gan_patch}, {"used", patch}});
    const int per_frame = patch == 0 ? 1 : config.gan_patches_per_frame;
    for (const auto& sd : scenes) {
      std::vector<LDRFrame> ldr;
      for (int i = 0; i < static_cast<int>(sd.hdr.size()); ++i) {
        auto clean = dataio::CleanLdr(manifest, sd.hdr[i], i);
        ldr.push_back(config.add_noise ? dataio::NoisyLdr(manifest, clean, sd.scene->id, i).frame : clean);
      }
      const auto prepared = PrepareSequence(pipeline, ldr);
      std::vector<Raster> tonemapped;
      for (const auto& h : sd.hdr) tonemapped.push_back(radiometry::Tonemap(h).data);
      for (int i = 1; i < static_cast<int>(sd.hdr.size()); ++i) {
        for (int k = 0; k < per_frame; ++k) {
          Unit u;
          u.scene = sd.scene->id;
          u.frame = i;
          u.patch = k;
          int top = 0, left = 0, h = sd.hdr[i].data.height(), w = sd.hdr[i].data.width();
          if (patch > 0) {
            Rng rng(DeriveSeed(config.seed, "gan-patch", {Fnv1a(u.scene), uint64_t(i), uint64_t(k)}));
            top = std::uniform_int_distribution<int>(0, h - patch)(rng);
            left = std::uniform_int_distribution<int>(0, w - patch)(rng);
            h = w = patch;
          }
          u.in_cur = CropRaster(prepared[i].input, top, left, h, w);
          u.in_prev = CropRaster(prepared[i - 1].input, top, left, h, w);
          u.gt_cur = CropRaster(tonemapped[i], top, left, h, w);
          u.gt_prev = CropRaster(tonemapped[i - 1], top, left, h, w);
          u.flow = CropRaster(prepared[i].flow.data, top, left, h, w);
          units.push_back(std::move(u));
        }
      }
    }
    for (const auto& u : units)
      Require(u.in_cur.same_shape(units.front().in_cur), ErrorCode::kShapeMismatch,
              "full-frame GAN training needs equal frame sizes; set gan_patch");
    log.Write({{"event", "gan_units"}, {"units", units.size()}, {"patch", patch}, {"scenes", scenes.size()}});
  }

  template <typename Get>
  Var<float> Stack(const std::vector<size_t>& idx, Get get) {
    std::vector<const Raster*> rs;
    for (size_t i : idx) rs.push_back(&get(units[i]));
    return nn::StackRasters<float>(std::span<const Raster* const>(rs));
  }

  Var<float> Score(const Var<float>& pairs, bool training) {
    Var<float> s = d->Forward(pairs, training);
    return config.discriminator.head == networks::DiscriminatorHead::kLogit ? nn::Sigmoid(s) : s;
  }

  void CheckFinite(const StepRecord& r) {
    const std::pair<const char*, double> terms[] = {{"d_loss", r.d_loss}, {"g_loss", r.g_loss},
                                                    {"adv", r.adv},       {"content", r.content},
                                                    {"style", r.style},   {"l1", r.l1},
                                                    {"reg", r.reg}};
    for (const auto& [name, v] : terms) {
      if (std::isfinite(v)) continue;
      json event = {{"event", "non_finite_loss"}, {"term", name}, {"step", r.step}, {"stage", r.stage}};
      if (!snapshot_path.empty()) event["snapshot"] = snapshot_path.string();
      log.Write(event);
      if (!snapshot_path.empty()) Save(snapshot_path);
      Fail(ErrorCode::kNumeric, std::string("loss term '") + name + "' is not finite at step " +
                                    std::to_string(r.step) + (snapshot_path.empty() ? "" : "; snapshot written to " +
                                                                                               snapshot_path.string()));
    }
  }

  StepRecord Step() {
    Require(!done(), ErrorCode::kState, "training is already complete");
    StepRecord r;
    r.stage = stage();
    r.epoch = epoch;
    r.step = step + 1;
    if (r.stage == 2 && stage2_first_step < 0) {
      stage2_first_step = r.step;
      log.Write({{"event", "stage_transition"}, {"stage", 2}, {"step", r.step}, {"epoch", epoch}});
    }
    const size_t b = batch_size();
    const size_t start = static_cast<size_t>(batch_in_epoch) * b;
    std::vector<size_t> idx(order.begin() + start, order.begin() + std::min(units.size(), start + b));
    const int n = static_cast<int>(idx.size());

    Var<float> x = nn::ConcatBatch<float>({Stack(idx, [](Unit& u) -> Raster& { return u.in_cur; }),
                                           Stack(idx, [](Unit& u) -> Raster& { return u.in_prev; })});
    Var<float> gt_cur = Stack(idx, [](Unit& u) -> Raster& { return u.gt_cur; });
    Var<float> gt_prev = Stack(idx, [](Unit& u) -> Raster& { return u.gt_prev; });
    Var<float> fake = g->Forward(x);
    Var<float> fake_cur = nn::SliceBatch(fake, 0, n);
    Var<float> fake_prev = nn::SliceBatch(fake, n, n);
    Var<float> real_pair = nn::ConcatChannels<float>({gt_cur, gt_prev});
    Var<float> fake_pair = nn::ConcatChannels<float>({fake_cur, fake_prev});

    // Discriminator step on detached fakes.
    {
      auto v = fake_pair.value();
      Var<float> detached = Var<float>::Constant(fake_pair.shape(), {v.begin(), v.end()});
      Var<float> scores = Score(nn::ConcatBatch<float>({real_pair, detached}), true);
      Var<float> d_loss = losses::DiscriminatorLoss(nn::SliceBatch(scores, 0, n), nn::SliceBatch(scores, n, n),
                                                    static_cast<float>(losses::kLogEps));
      r.d_loss = d_loss.item();
      opt_d->ZeroGrad();
      d_loss.Backward();
      opt_d->Step();
    }

    // Generator step.
    losses::ReconstructionParts<float> parts;
    parts.adv = losses::GeneratorAdversarialLoss(Score(fake_pair, false), static_cast<float>(losses::kLogEps));
    parts.content = losses::ContentLoss(*features, fake_cur, gt_cur, config.content_normalizer);
    parts.style = losses::StyleLoss(*features, fake_cur, gt_cur);
    parts.l1 = losses::L1Loss(fake_cur, gt_cur);
    Var<float> loss = losses::ReconstructionLoss(config.weights, parts, config.style_weighted_content);
    if (r.stage == 2) {
      Var<float> flow = Stack(idx, [](Unit& u) -> Raster& { return u.flow; });
      Var<float> reg = losses::TemporalRegLoss(fake_cur, fake_prev, flow.value());
      r.reg = reg.item();
      loss = losses::TotalLoss(config.weights, loss, reg);
    }
    r.adv = parts.adv.item();
    r.content = parts.content.item();
    r.style = parts.style.item();
    r.l1 = parts.l1.item();
    r.g_loss = loss.item();
    CheckFinite(r);
    opt_g->ZeroGrad();
    loss.Backward();
    opt_g->Step();

    ++step;
    if (static_cast<size_t>(++batch_in_epoch) * b >= units.size()) {
      log.Write({{"event", "epoch_end"}, {"epoch", epoch}, {"stage", r.stage}, {"step", step}});
      ++epoch;
      batch_in_epoch = 0;
      Reshuffle();
    }
    json event = {{"event", "step"},  {"step", r.step},       {"stage", r.stage},     {"epoch", r.epoch},
                  {"d_loss", r.d_loss}, {"g_loss", r.g_loss}, {"adv", r.adv},         {"content", r.content},
                  {"style", r.style}, {"l1", r.l1}};
    if (r.stage == 2) event["reg"] = r.reg;
    log.Write(event);
    return r;
  }

  std::string StageTag() const {
    if (epoch >= total_epochs()) return "complete";
    return stage() == 1 ? "stage1" : "stage2";
  }

  void Save(const fs::path& path) {
    nn::CheckpointFile file;
    file.schema = kGanSchema;
    file.metadata = {{"stage", StageTag()},
                     {"step", step},
                     {"epoch", epoch},
                     {"batch_in_epoch", batch_in_epoch},
                     {"stage2_first_step", stage2_first_step},
                     {"config", ConfigToJson(config)},
                     {"config_hash", ConfigHash(config)},
                     {"resume_hash", ConfigHash(config, kResumableFields)},
                     {"seed", config.seed},
                     {"denoiser_digest", denoiser_digest},
                     {"generator_digest", StateDigest(g->state())},
                     {"adam_g_steps", opt_g->step_count()},
                     {"adam_d_steps", opt_d->step_count()},
                     {"flow_backend", pipeline.flow->name()},
                     {"hdr_scale", manifest.hdr_scale}};
    nn::ExportState(g->state(), "generator.", file);
    nn::ExportState(d->state(), "discriminator.", file);
    nn::ExportBuffers(opt_g->StateBuffers(), "adam_g.", file);
    nn::ExportBuffers(opt_d->StateBuffers(), "adam_d.", file);
    if (pipeline.uses_denoiser()) {
      nn::ExportState(pipeline.denoisers.low->state(), "denoiser_low.", file);
      nn::ExportState(pipeline.denoisers.high->state(), "denoiser_high.", file);
      file.metadata["denoisers"] = {
          {"low", {{"role", "low"}, {"config", DenoiserConfigJson(pipeline.denoisers.low->config())}}},
          {"high", {{"role", "high"}, {"config", DenoiserConfigJson(pipeline.denoisers.high->config())}}}};
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    nn::WriteCheckpointFile(path, file);
    log.Write({{"event", "checkpoint"}, {"path", path.string()}, {"step", step}, {"stage", StageTag()}});
  }

  void Load(const fs::path& path) {
    Require(fs::exists(path), ErrorCode::kIo, "checkpoint '" + path.string() + "' not found");
    const auto file = nn::ReadCheckpointFile(path);
    Require(file.schema == kGanSchema, ErrorCode::kParse, "'" + path.string() + "' is not a GAN checkpoint");
    const json& m = file.metadata;
    try {
      Require(m.at("resume_hash").get<std::string>() == ConfigHash(config, kResumableFields), ErrorCode::kState,
              "checkpoint '" + path.string() + "' was written with a different training config");
      Require(m.at("denoiser_digest").get<std::string>() == denoiser_digest, ErrorCode::kState,
              "checkpoint '" + path.string() + "' was trained against different denoisers");
      nn::ImportState(file, "generator.", g->state());
      nn::ImportState(file, "discriminator.", d->state());
      nn::ImportBuffers(file, "adam_g.", opt_g->StateBuffers());
      nn::ImportBuffers(file, "adam_d.", opt_d->StateBuffers());
      opt_g->set_step_count(m.at("adam_g_steps").get<long long>());
      opt_d->set_step_count(m.at("adam_d_steps").get<long long>());
      step = m.at("step").get<long long>();
      epoch = m.at("epoch").get<int>();
      batch_in_epoch = m.at("batch_in_epoch").get<int>();
      stage2_first_step = m.at("stage2_first_step").get<long long>();
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, "checkpoint '" + path.string() + "': " + e.what());
    }
    Reshuffle();
    log.Write({{"event", "resume"}, {"path", path.string()}, {"step", step}, {"epoch", epoch}});
  }

  double TrainingPsnr() {
    nn::NoGradGuard no_grad;
    double sum = 0.0;
    for (size_t start = 0; start < units.size(); start += 8) {
      std::vector<size_t> idx;
      for (size_t i = start; i < std::min(units.size(), start + 8); ++i) idx.push_back(i);
      Var<float> out = g->Forward(Stack(idx, [](Unit& u) -> Raster& { return u.in_cur; }));
      for (size_t k = 0; k < idx.size(); ++k)
        sum += metrics::Psnr(units[idx[k]].gt_cur, nn::TensorToRaster(out, static_cast<int>(k)));
    }
    return sum / static_cast<double>(units.size());
  }
};

GanTrainer::GanTrainer(const TrainConfig& config, const dataio::DatasetManifest& manifest,
                       const fs::path& denoiser_dir, EventLog& log)
    : impl_(std::make_unique<Impl>(config, manifest, denoiser_dir, log)) {}
GanTrainer::~GanTrainer() = default;
bool GanTrainer::done() const { return impl_->done(); }
StepRecord GanTrainer::Step() { return impl_->Step(); }
void GanTrainer::Save(const fs::path& path) { impl_->Save(path); }
void GanTrainer::Load(const fs::path& path) { impl_->Load(path); }
void GanTrainer::set_snapshot_path(const fs::path& path) { impl_->snapshot_path = path; }
double GanTrainer::TrainingPsnr() { return impl_->TrainingPsnr(); }
long long GanTrainer::step() const { return impl_->step; }
int GanTrainer::stage() const { return impl_->stage(); }
size_t GanTrainer::unit_count() const { return impl_->units.size(); }
std::string GanTrainer::denoiser_digest() const { return impl_->pipeline.denoisers.digest(); }
networks::Generator& GanTrainer::generator() { return *impl_->g; }
networks::Discriminator& GanTrainer::discriminator() { return *impl_->d; }

GanTrainResult TrainGan(const TrainConfig& config, const dataio::DatasetManifest& manifest,
                        const GanTrainOptions& options, EventLog& log) {
  GanTrainer trainer(config, manifest, options.denoiser_dir, log);
  trainer.set_snapshot_path(options.out_dir / "nan_snapshot.ckpt");
  if (options.resume) trainer.Load(*options.resume);
  GanTrainResult result;
  result.denoiser_digest_before = trainer.denoiser_digest();
  while (!trainer.done()) {
    if (options.stop_after_steps > 0 && trainer.step() >= options.stop_after_steps) break;
    const StepRecord r = trainer.Step();
    if (r.stage == 2 && result.stage2_first_step < 0 && (result.history.empty() || result.history.back().stage == 1))
      result.stage2_first_step = r.step;
    result.history.push_back(r);
    if (config.checkpoint_every > 0 && trainer.step() % config.checkpoint_every == 0) {
      char name[40];
      std::snprintf(name, sizeof(name), "gan_step_%06lld.ckpt", trainer.step());
      trainer.Save(options.out_dir / name);
    }
  }
  result.denoiser_digest_after = trainer.denoiser_digest();
  Require(result.denoiser_digest_before == result.denoiser_digest_after, ErrorCode::kState,
          "denoiser parameters changed during GAN training");
  result.steps = trainer.step();
  result.checkpoint = options.out_dir / kGanFile;
  trainer.Save(result.checkpoint);
  log.Write({{"event", "gan_done"},
             {"steps", result.steps},
             {"denoiser_digest", result.denoiser_digest_after},
             {"checkpoint", result.checkpoint.string()}});
  return result;
}

// ---------------------------------------------------------------- inference

TrainedModel LoadTrainedModel(const fs::path& checkpoint) {
  Require(fs::exists(checkpoint), ErrorCode::kIo,
          "checkpoint '" + checkpoint.string() + "' not found; run train first");
  const auto file = nn::ReadCheckpointFile(checkpoint);
  Require(file.schema == kGanSchema, ErrorCode::kParse, "'" + checkpoint.string() + "' is not a GAN checkpoint");
  TrainedModel model;
  try {
    const json& m = file.metadata;
    model.config = ConfigFromJson(m.at("config"));
    model.generator = std::make_unique<networks::Generator>(model.config.generator, 0);
    nn::ImportState(file, "generator.", model.generator->state());
    if (model.config.use_denoiser) {
      model.pipeline.denoisers.low = DenoiserFromFile(file, "denoiser_low.", m.at("denoisers").at("low"));
      model.pipeline.denoisers.high = DenoiserFromFile(file, "denoiser_high.", m.at("denoisers").at("high"));
    }
    model.pipeline.flow = flowalign::MakeFlowBackend(m.at("flow_backend").get<std::string>());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "checkpoint '" + checkpoint.string() + "': " + e.what());
  }
  return model;
}

std::vector<radiometry::TonemappedFrame> InferFrames(TrainedModel& model, const std::vector<LDRFrame>& frames) {
  Require(frames.size() >= 2, ErrorCode::kInvalidArgument,
          "inference needs at least 2 frames, got " + std::to_string(frames.size()));
  const auto prepared = PrepareSequence(model.pipeline, frames);
  nn::NoGradGuard no_grad;
  std::vector<radiometry::TonemappedFrame> out;
  for (const auto& p : prepared) {
    const Raster* in[] = {&p.input};
    Var<float> y = model.generator->Forward(nn::StackRasters<float>(std::span<const Raster* const>(in)));
    out.push_back({nn::TensorToRaster(y, 0)});
  }
  return out;
}

InferResult InferVideo(const fs::path& checkpoint, const fs::path& sequence_index, const fs::path& out_dir,
                       EventLog& log) {
  TrainedModel model = LoadTrainedModel(checkpoint);
  const auto seq = dataio::LoadSequence(sequence_index);
  const auto frames = dataio::LoadSequenceLdr(sequence_index, seq);
  const auto tonemapped = InferFrames(model, frames);
  fs::create_directories(out_dir);
  InferResult result;
  result.fallback_frames = 1;
  json listed = json::array();
  for (size_t i = 0; i < tonemapped.size(); ++i) {
    const auto hdr = radiometry::DenormalizeHdr(radiometry::InverseTonemap(tonemapped[i]), seq.hdr_scale);
    const std::string name = FrameName("hdr", static_cast<int>(i), "exr");
    radiometry::WriteHdrFrame(out_dir / name, hdr);
    result.frames.push_back(out_dir / name);
    listed.push_back({{"file", name}, {"frame_index", i}, {"fallback", i == 0}});
  }
  result.index = out_dir / "prediction.json";
  std::ofstream out(result.index, std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write '" + result.index.string() + "'");
  out << json{{"schema", kPredictionSchema},
              {"scene", seq.scene_id},
              {"hdr_scale", seq.hdr_scale},
              {"checkpoint", fs::absolute(checkpoint).string()},
              {"sequence", fs::absolute(sequence_index).string()},
              {"frame0", "paired with itself under zero flow"},
              {"frames", listed}}
             .dump(2)
      << "\n";
  log.Write({{"event", "infer"}, {"scene", seq.scene_id}, {"frames", tonemapped.size()}, {"out", out_dir.string()}});
  return result;
}

metrics::EvaluationReport EvaluatePrediction(const fs::path& sequence_index, const fs::path& prediction_dir,
                                             const metrics::EvalOptions& options, bool skip_fallback) {
  const auto seq = dataio::LoadSequence(sequence_index);
  const fs::path pred_index = prediction_dir / "prediction.json";
  std::ifstream in(pred_index);
  Require(static_cast<bool>(in), ErrorCode::kIo,
          "prediction index '" + pred_index.string() + "' not found; run infer first");
  json p;
  try {
    p = json::parse(in);
    Require(p.value("schema", "") == kPredictionSchema, ErrorCode::kParse,
            "'" + pred_index.string() + "' is not a prediction index");
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "'" + pred_index.string() + "': " + e.what());
  }
  const auto& listed = p.at("frames");
  Require(listed.size() == seq.frames.size(), ErrorCode::kShapeMismatch,
          "prediction has " + std::to_string(listed.size()) + " frames, sequence has " +
              std::to_string(seq.frames.size()));
  const size_t first = skip_fallback ? 1 : 0;
  std::vector<radiometry::LinearHDRFrame> gt, pred;
  for (size_t i = first; i < seq.frames.size(); ++i) {
    Require(!seq.frames[i].gt.empty(), ErrorCode::kInvalidArgument,
            "sequence frame " + std::to_string(i) + " has no ground truth");
    gt.push_back(radiometry::ReadHdrFrame(sequence_index.parent_path() / seq.frames[i].gt));
    pred.push_back(radiometry::ReadHdrFrame(prediction_dir / listed[i].at("file").get<std::string>()));
  }
  metrics::EvalOptions opt = options;
  opt.hdr_scale = seq.hdr_scale;
  auto report = metrics::EvaluateSequence(gt, pred, opt);
  report.sequence = seq.scene_id;
  for (auto& f : report.frames) f.frame_index += static_cast<int>(first);
  report.metadata = {{"prediction", fs::absolute(prediction_dir).string()},
                     {"sequence_index", fs::absolute(sequence_index).string()},
                     {"hdr_scale", seq.hdr_scale},
                     {"skip_fallback", skip_fallback}};
  return report;
}

// ----------------------------------------------------------------- ablation

json AblationToJson(const AblationReport& report) {
  json variants = json::array();
  for (const auto& v : report.variants) {
    json scenes = json::array();
    for (const auto& r : v.reports) scenes.push_back(metrics::ReportToJson(r));
    variants.push_back({{"name", v.name},
                        {"use_denoiser", v.use_denoiser},
                        {"config_hash", v.config_hash},
                        {"mean_psnr", v.mean_psnr},
                        {"mean_ssim", v.mean_ssim},
                        {"scenes", scenes}});
  }
  return {{"schema", "hdrgan.ablation/1"},
          {"shared_config_hash", report.shared_config_hash},
          {"add_noise", report.add_noise},
          {"variants", variants},
          {"delta_psnr", report.delta_psnr},
          {"delta_ssim", report.delta_ssim}};
}

AblationReport RunAblation(const TrainConfig& config, const dataio::DatasetManifest& manifest,
                           const fs::path& work_dir, EventLog& log) {
  Validate(config);
  Require(!manifest.scenes_in(dataio::Split::kTest).empty(), ErrorCode::kConfig,
          "ablation needs at least one test scene");
  fs::create_directories(work_dir);
  AblationReport report;
  report.add_noise = config.add_noise;
  report.shared_config_hash = ConfigHash(config, {"use_denoiser"});

  const fs::path denoiser_dir = work_dir / "denoisers";
  TrainDenoisers(config, manifest, denoiser_dir, log);
  const auto sequences =
      dataio::MaterializeSequences(manifest, dataio::Split::kTest, work_dir / "sequences", config.add_noise);

  for (const bool use : {true, false}) {
    TrainConfig c = config;
    c.use_denoiser = use;
    AblationVariant v;
    v.name = use ? "with_denoiser" : "without_denoiser";
    v.use_denoiser = use;
    v.config_hash = ConfigHash(c);
    log.Write({{"event", "ablation_variant"}, {"name", v.name}, {"config_hash", v.config_hash}});
    const auto trained = TrainGan(c, manifest, {denoiser_dir, work_dir / v.name, std::nullopt, 0}, log);
    for (const auto& idx : sequences) {
      const fs::path pred_dir = work_dir / v.name / "prediction" / idx.parent_path().filename();
      InferVideo(trained.checkpoint, idx, pred_dir, log);
      v.reports.push_back(EvaluatePrediction(idx, pred_dir, {}));
      v.mean_psnr += v.reports.back().mean_psnr;
      v.mean_ssim += v.reports.back().mean_ssim;
    }
    v.mean_psnr /= static_cast<double>(v.reports.size());
    v.mean_ssim /= static_cast<double>(v.reports.size());
    report.variants.push_back(std::move(v));
  }
  report.delta_psnr = report.variants[0].mean_psnr - report.variants[1].mean_psnr;
  report.delta_ssim = report.variants[0].mean_ssim - report.variants[1].mean_ssim;
  std::ofstream out(work_dir / "ablation.json", std::ios::trunc);
  out << AblationToJson(report).dump(2) << "\n";
  log.Write({{"event", "ablation_done"}, {"delta_psnr", report.delta_psnr}, {"delta_ssim", report.delta_ssim}});
  return report;
}

}  // namespace hdrgan::trainer
