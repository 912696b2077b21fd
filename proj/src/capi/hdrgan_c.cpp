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

#include <cstring>
#include <mutex>
#include <string>

#include "hdrgan/hdrgan.h"
#include "hdrgan/metrics/metrics.hpp"
#include "hdrgan/radiometry/radiometry.hpp"
#include "hdrgan/report/report.hpp"
#include "hdrgan/trainer/trainer.hpp"

struct hdrgan_config {
  hdrgan::trainer::TrainConfig value;
};

struct hdrgan_manifest {
  hdrgan::dataio::DatasetManifest value;
};

namespace {

namespace fs = std::filesystem;
using hdrgan::Error;
using hdrgan::ErrorCode;

thread_local std::string g_last_error;

std::mutex g_event_mutex;
hdrgan_event_fn g_event_fn = nullptr;
void* g_event_user = nullptr;

hdrgan_status ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return HDRGAN_INVALID_ARGUMENT;
    case ErrorCode::kIo: return HDRGAN_IO;
    case ErrorCode::kParse: return HDRGAN_PARSE;
    case ErrorCode::kConfig: return HDRGAN_CONFIG;
    case ErrorCode::kShapeMismatch: return HDRGAN_SHAPE;
    case ErrorCode::kNumeric: return HDRGAN_NUMERIC;
    case ErrorCode::kState: return HDRGAN_STATE;
  }
  return HDRGAN_INTERNAL;
}

template <typename F>
hdrgan_status Guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return HDRGAN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return HDRGAN_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return HDRGAN_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HDRGAN_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HDRGAN_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HDRGAN_INTERNAL;
  }
}

void NeedArg(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

hdrgan::trainer::EventLog MakeLog(const char* path) {
  hdrgan::trainer::EventLog log = path ? hdrgan::trainer::EventLog(path) : hdrgan::trainer::EventLog();
  log.set_echo([](const nlohmann::json& event) {
    std::lock_guard lock(g_event_mutex);
    if (g_event_fn) g_event_fn(event.dump().c_str(), g_event_user);
  });
  return log;
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hdrgan::dataio::Split ToSplit(hdrgan_split s) {
  if (s == HDRGAN_SPLIT_TRAIN) return hdrgan::dataio::Split::kTrain;
  if (s == HDRGAN_SPLIT_TEST) return hdrgan::dataio::Split::kTest;
  throw Error(ErrorCode::kInvalidArgument, "unknown split " + std::to_string(static_cast<int>(s)));
}

hdrgan::Raster Wrap(const float* p, int h, int w, int c) {
  hdrgan::Raster r(h, w, c);
  std::memcpy(r.data().data(), p, r.size() * sizeof(float));
  return r;
}

}  // namespace

extern "C" {

const char* hdrgan_version(void) { return HDRGAN_VERSION; }

const char* hdrgan_status_name(hdrgan_status status) {
  switch (status) {
    case HDRGAN_OK: return "ok";
    case HDRGAN_INVALID_ARGUMENT: return "invalid argument";
    case HDRGAN_IO: return "i/o error";
    case HDRGAN_PARSE: return "parse error";
    case HDRGAN_CONFIG: return "configuration error";
    case HDRGAN_SHAPE: return "shape mismatch";
    case HDRGAN_NUMERIC: return "numeric error";
    case HDRGAN_STATE: return "state error";
    case HDRGAN_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* hdrgan_last_error(void) { return g_last_error.c_str(); }

void hdrgan_string_free(char* s) { std::free(s); }

void hdrgan_set_event_callback(hdrgan_event_fn fn, void* user) {
  std::lock_guard lock(g_event_mutex);
  g_event_fn = fn;
  g_event_user = user;
}

hdrgan_status hdrgan_config_default(hdrgan_config** out) {
  return Guard([&] {
    NeedArg(out, "out");
    *out = new hdrgan_config{};
  });
}

hdrgan_status hdrgan_config_load(const char* path, hdrgan_config** out) {
  return Guard([&] {
    NeedArg(path && out, "path and out");
    *out = new hdrgan_config{hdrgan::trainer::LoadConfig(path)};
  });
}

hdrgan_status hdrgan_config_merge_json(hdrgan_config* config, const char* json_text) {
  return Guard([&] {
    NeedArg(config && json_text, "config and json_text");
    const auto patch = nlohmann::json::parse(json_text);
    if (!patch.is_object()) throw Error(ErrorCode::kConfig, "configuration override must be a JSON object");
    auto merged = hdrgan::trainer::ConfigToJson(config->value);
    merged.merge_patch(patch);
    config->value = hdrgan::trainer::ConfigFromJson(merged);
  });
}

hdrgan_status hdrgan_config_to_json(const hdrgan_config* config, char** out) {
  return Guard([&] {
    NeedArg(config && out, "config and out");
    *out = CopyString(hdrgan::trainer::ConfigToJson(config->value).dump(2));
  });
}

hdrgan_status hdrgan_config_save(const hdrgan_config* config, const char* path) {
  return Guard([&] {
    NeedArg(config && path, "config and path");
    hdrgan::trainer::SaveConfig(path, config->value);
  });
}

void hdrgan_config_free(hdrgan_config* config) { delete config; }

hdrgan_ingest_options hdrgan_ingest_defaults(void) {
  const hdrgan::dataio::IngestOptions d;
  return {d.test_count, 3.0, d.noise.sigma_lo, d.noise.sigma_hi, d.noise.seed};
}

hdrgan_status hdrgan_manifest_ingest(const char* root, const hdrgan_ingest_options* options,
                                     hdrgan_manifest** out) {
  return Guard([&] {
    NeedArg(root && out, "root and out");
    const hdrgan_ingest_options o = options ? *options : hdrgan_ingest_defaults();
    hdrgan::dataio::IngestOptions io;
    io.test_count = o.test_count;
    io.schedule = hdrgan::dataio::ScheduleFromStops(o.stops);
    io.noise.sigma_lo = static_cast<float>(o.sigma_min);
    io.noise.sigma_hi = static_cast<float>(o.sigma_max);
    io.noise.seed = o.seed;
    if (!(o.sigma_min >= 0.0 && o.sigma_min <= o.sigma_max))
      throw Error(ErrorCode::kConfig, "sigma range must satisfy 0 <= min <= max");
    *out = new hdrgan_manifest{hdrgan::dataio::Ingest(root, io)};
  });
}

hdrgan_status hdrgan_manifest_load(const char* path, hdrgan_manifest** out) {
  return Guard([&] {
    NeedArg(path && out, "path and out");
    *out = new hdrgan_manifest{hdrgan::dataio::LoadManifest(path)};
  });
}

hdrgan_status hdrgan_manifest_save(const hdrgan_manifest* manifest, const char* path) {
  return Guard([&] {
    NeedArg(manifest && path, "manifest and path");
    hdrgan::dataio::SaveManifest(path, manifest->value);
  });
}

hdrgan_status hdrgan_manifest_scene_count(const hdrgan_manifest* manifest, hdrgan_split split, int* out) {
  return Guard([&] {
    NeedArg(manifest && out, "manifest and out");
    *out = static_cast<int>(manifest->value.scenes_in(ToSplit(split)).size());
  });
}

void hdrgan_manifest_free(hdrgan_manifest* manifest) { delete manifest; }

hdrgan_synth_options hdrgan_synth_defaults(void) {
  const hdrgan::dataio::SyntheticOptions d;
  return {d.width, d.height, d.frames, d.max_motion_px, d.seed};
}

hdrgan_status hdrgan_synthesize(const char* root, int scene_count, const hdrgan_synth_options* options) {
  return Guard([&] {
    NeedArg(root, "root");
    const hdrgan_synth_options o = options ? *options : hdrgan_synth_defaults();
    hdrgan::dataio::SyntheticOptions so;
    so.width = o.width;
    so.height = o.height;
    so.frames = o.frames;
    so.max_motion_px = o.max_motion_px;
    so.seed = o.seed;
    hdrgan::dataio::WriteSyntheticDataset(root, scene_count, so);
  });
}

hdrgan_status hdrgan_materialize(const hdrgan_manifest* manifest, hdrgan_split split, int add_noise,
                                 const char* out_dir, int* count) {
  return Guard([&] {
    NeedArg(manifest && out_dir, "manifest and out_dir");
    const auto idx = hdrgan::dataio::MaterializeSequences(manifest->value, ToSplit(split), out_dir, add_noise != 0);
    if (count) *count = static_cast<int>(idx.size());
  });
}

hdrgan_status hdrgan_train_denoisers(const hdrgan_config* config, const hdrgan_manifest* manifest,
                                     const char* out_dir, const char* log_path) {
  return Guard([&] {
    NeedArg(config && manifest && out_dir, "config, manifest and out_dir");
    hdrgan::trainer::ApplyDevice(config->value);
    auto log = MakeLog(log_path);
    hdrgan::trainer::TrainDenoisers(config->value, manifest->value, out_dir, log);
  });
}

hdrgan_status hdrgan_train_gan(const hdrgan_config* config, const hdrgan_manifest* manifest,
                               const char* denoiser_dir, const char* out_dir, const char* resume,
                               int64_t stop_after_steps, const char* log_path, hdrgan_train_summary* summary) {
  return Guard([&] {
    NeedArg(config && manifest && denoiser_dir && out_dir, "config, manifest, denoiser_dir and out_dir");
    if (stop_after_steps < 0) throw Error(ErrorCode::kInvalidArgument, "stop_after_steps must be >= 0");
    hdrgan::trainer::ApplyDevice(config->value);
    auto log = MakeLog(log_path);
    hdrgan::trainer::GanTrainOptions o;
    o.denoiser_dir = denoiser_dir;
    o.out_dir = out_dir;
    if (resume) o.resume = fs::path(resume);
    o.stop_after_steps = stop_after_steps;
    const auto r = hdrgan::trainer::TrainGan(config->value, manifest->value, o, log);
    if (summary) {
      summary->steps = r.steps;
      summary->stage2_first_step = r.stage2_first_step;
      summary->final_g_loss = r.history.empty() ? 0.0 : r.history.back().g_loss;
      summary->final_d_loss = r.history.empty() ? 0.0 : r.history.back().d_loss;
    }
  });
}

hdrgan_status hdrgan_infer(const char* checkpoint, const char* sequence_index, const char* out_dir,
                           const char* log_path, int* frames_written) {
  return Guard([&] {
    NeedArg(checkpoint && sequence_index && out_dir, "checkpoint, sequence_index and out_dir");
    auto log = MakeLog(log_path);
    const auto r = hdrgan::trainer::InferVideo(checkpoint, sequence_index, out_dir, log);
    if (frames_written) *frames_written = static_cast<int>(r.frames.size());
  });
}

hdrgan_eval_options hdrgan_eval_defaults(void) {
  const hdrgan::metrics::EvalOptions d;
  return {d.border_px, d.mu, 0, 0};
}

hdrgan_status hdrgan_evaluate(const char* sequence_index, const char* prediction_dir,
                              const hdrgan_eval_options* options, const char* report_path, double* mean_psnr,
                              double* mean_ssim) {
  return Guard([&] {
    NeedArg(sequence_index && prediction_dir, "sequence_index and prediction_dir");
    const hdrgan_eval_options o = options ? *options : hdrgan_eval_defaults();
    if (o.border_px < 0) throw Error(ErrorCode::kInvalidArgument, "border must be >= 0");
    hdrgan::metrics::EvalOptions eo;
    eo.border_px = o.border_px;
    eo.mu = static_cast<float>(o.mu);
    eo.domain = o.linear_domain ? hdrgan::metrics::MetricDomain::kLinear : hdrgan::metrics::MetricDomain::kTonemapped;
    const auto report = hdrgan::trainer::EvaluatePrediction(sequence_index, prediction_dir, eo, o.include_first == 0);
    if (report_path) hdrgan::metrics::SaveReport(report_path, report);
    if (mean_psnr) *mean_psnr = report.mean_psnr;
    if (mean_ssim) *mean_ssim = report.mean_ssim;
  });
}

hdrgan_status hdrgan_ablate(const hdrgan_config* config, const hdrgan_manifest* manifest, const char* work_dir,
                            const char* log_path, double* delta_psnr, double* delta_ssim) {
  return Guard([&] {
    NeedArg(config && manifest && work_dir, "config, manifest and work_dir");
    hdrgan::trainer::ApplyDevice(config->value);
    auto log = MakeLog(log_path);
    const auto r = hdrgan::trainer::RunAblation(config->value, manifest->value, work_dir, log);
    if (delta_psnr) *delta_psnr = r.delta_psnr;
    if (delta_ssim) *delta_ssim = r.delta_ssim;
  });
}

hdrgan_status hdrgan_render_report(const char* const* logs, size_t log_count, const char* const* evaluations,
                                   size_t evaluation_count, const char* out_dir) {
  return Guard([&] {
    NeedArg(out_dir, "out_dir");
    NeedArg(logs || log_count == 0, "logs");
    NeedArg(evaluations || evaluation_count == 0, "evaluations");
    hdrgan::report::ReportInputs in;
    for (size_t i = 0; i < log_count; ++i) in.logs.emplace_back(logs[i]);
    for (size_t i = 0; i < evaluation_count; ++i) in.evaluations.emplace_back(evaluations[i]);
    hdrgan::report::RenderReport(in, out_dir);
  });
}

hdrgan_status hdrgan_tonemap(const float* hdr, float* out, size_t count, float mu) {
  return Guard([&] {
    NeedArg((hdr && out) || count == 0, "hdr and out");
    if (!(mu > 0.0f)) throw Error(ErrorCode::kInvalidArgument, "mu must be positive");
    for (size_t i = 0; i < count; ++i) out[i] = hdrgan::radiometry::TonemapValue(hdr[i], mu);
  });
}

hdrgan_status hdrgan_inverse_tonemap(const float* tonemapped, float* out, size_t count, float mu) {
  return Guard([&] {
    NeedArg((tonemapped && out) || count == 0, "tonemapped and out");
    if (!(mu > 0.0f)) throw Error(ErrorCode::kInvalidArgument, "mu must be positive");
    for (size_t i = 0; i < count; ++i) out[i] = hdrgan::radiometry::InverseTonemapValue(tonemapped[i], mu);
  });
}

hdrgan_status hdrgan_psnr(const float* gt, const float* pred, size_t count, double* out) {
  return Guard([&] {
    NeedArg(gt && pred && out, "gt, pred and out");
    if (count == 0) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
    *out = hdrgan::metrics::Psnr(Wrap(gt, 1, static_cast<int>(count), 1), Wrap(pred, 1, static_cast<int>(count), 1));
  });
}

hdrgan_status hdrgan_ssim(const float* gt, const float* pred, int height, int width, int channels, double* out) {
  return Guard([&] {
    NeedArg(gt && pred && out, "gt, pred and out");
    if (height <= 0 || width <= 0 || channels <= 0)
      throw Error(ErrorCode::kInvalidArgument, "dimensions must be positive");
    *out = hdrgan::metrics::Ssim(Wrap(gt, height, width, channels), Wrap(pred, height, width, channels));
  });
}

}  // extern "C"
