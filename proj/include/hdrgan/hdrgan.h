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

/* C interface to the hdrgan toolkit.
 *
 * Every function returns an hdrgan_status. On failure the message for the
 * calling thread is available from hdrgan_last_error() until the next call
 * on that thread. Objects are opaque and released with their _free function.
 * Strings returned through char** are released with hdrgan_string_free. */

#ifndef HDRGAN_HDRGAN_H_
#define HDRGAN_HDRGAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HDRGAN_BUILDING_LIBRARY)
#define HDRGAN_API __attribute__((visibility("default")))
#else
#define HDRGAN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hdrgan_status {
  HDRGAN_OK = 0,
  HDRGAN_INVALID_ARGUMENT = 1,
  HDRGAN_IO = 2,
  HDRGAN_PARSE = 3,
  HDRGAN_CONFIG = 4,
  HDRGAN_SHAPE = 5,
  HDRGAN_NUMERIC = 6,
  HDRGAN_STATE = 7,
  HDRGAN_INTERNAL = 99
} hdrgan_status;

typedef enum hdrgan_split { HDRGAN_SPLIT_TRAIN = 0, HDRGAN_SPLIT_TEST = 1 } hdrgan_split;

typedef struct hdrgan_config hdrgan_config;
typedef struct hdrgan_manifest hdrgan_manifest;

HDRGAN_API const char* hdrgan_version(void);
HDRGAN_API const char* hdrgan_status_name(hdrgan_status status);
HDRGAN_API const char* hdrgan_last_error(void);
HDRGAN_API void hdrgan_string_free(char* s);

/* Receives every training/inference event as one JSON object per call.
 * Pass NULL to disable. Process-wide. */
typedef void (*hdrgan_event_fn)(const char* json_line, void* user);
HDRGAN_API void hdrgan_set_event_callback(hdrgan_event_fn fn, void* user);

/* Training configuration. */
HDRGAN_API hdrgan_status hdrgan_config_default(hdrgan_config** out);
HDRGAN_API hdrgan_status hdrgan_config_load(const char* path, hdrgan_config** out);
/* Merges a JSON object into the configuration. Nested objects merge key by key. */
HDRGAN_API hdrgan_status hdrgan_config_merge_json(hdrgan_config* config, const char* json_text);
HDRGAN_API hdrgan_status hdrgan_config_to_json(const hdrgan_config* config, char** out);
HDRGAN_API hdrgan_status hdrgan_config_save(const hdrgan_config* config, const char* path);
HDRGAN_API void hdrgan_config_free(hdrgan_config* config);

/* Datasets. */
typedef struct hdrgan_ingest_options {
  int test_count;     /* default 3 */
  double stops;       /* exposure gap between the two alternating exposures, default 3 */
  double sigma_min;   /* noise standard deviation range, default [0.01, 0.05] */
  double sigma_max;
  uint64_t seed;      /* noise seed, default 0 */
} hdrgan_ingest_options;

HDRGAN_API hdrgan_ingest_options hdrgan_ingest_defaults(void);
HDRGAN_API hdrgan_status hdrgan_manifest_ingest(const char* root, const hdrgan_ingest_options* options,
                                                hdrgan_manifest** out);
HDRGAN_API hdrgan_status hdrgan_manifest_load(const char* path, hdrgan_manifest** out);
HDRGAN_API hdrgan_status hdrgan_manifest_save(const hdrgan_manifest* manifest, const char* path);
HDRGAN_API hdrgan_status hdrgan_manifest_scene_count(const hdrgan_manifest* manifest, hdrgan_split split,
                                                     int* out);
HDRGAN_API void hdrgan_manifest_free(hdrgan_manifest* manifest);

typedef struct hdrgan_synth_options {
  int width;          /* default 128 */
  int height;         /* default 96 */
  int frames;         /* default 8 */
  double max_motion_px;
  uint64_t seed;
} hdrgan_synth_options;

HDRGAN_API hdrgan_synth_options hdrgan_synth_defaults(void);
/* Writes root/scene_NN/frame_NNNN.exr for scene_count procedural scenes. */
HDRGAN_API hdrgan_status hdrgan_synthesize(const char* root, int scene_count, const hdrgan_synth_options* options);

/* Writes alternating-exposure LDR sequences with ground truth; sets *count to the number of sequences.
 * The index of sequence k is out_dir/<scene>/sequence.json. */
HDRGAN_API hdrgan_status hdrgan_materialize(const hdrgan_manifest* manifest, hdrgan_split split, int add_noise,
                                            const char* out_dir, int* count);

/* Training. log_path may be NULL. */
HDRGAN_API hdrgan_status hdrgan_train_denoisers(const hdrgan_config* config, const hdrgan_manifest* manifest,
                                                const char* out_dir, const char* log_path);

typedef struct hdrgan_train_summary {
  int64_t steps;
  int64_t stage2_first_step; /* -1 when stage 2 did not start */
  double final_g_loss;
  double final_d_loss;
} hdrgan_train_summary;

/* resume may be NULL. stop_after_steps = 0 runs to completion. summary may be NULL. */
HDRGAN_API hdrgan_status hdrgan_train_gan(const hdrgan_config* config, const hdrgan_manifest* manifest,
                                          const char* denoiser_dir, const char* out_dir, const char* resume,
                                          int64_t stop_after_steps, const char* log_path,
                                          hdrgan_train_summary* summary);

/* Inference and evaluation. */
HDRGAN_API hdrgan_status hdrgan_infer(const char* checkpoint, const char* sequence_index, const char* out_dir,
                                      const char* log_path, int* frames_written);

typedef struct hdrgan_eval_options {
  int border_px;      /* default 10 */
  double mu;          /* default 5000 */
  int linear_domain;  /* 0: tonemapped (default), 1: linear, diagnostics only */
  int include_first;  /* 1: score frame 0 (the duplicated-neighbor frame) as well */
} hdrgan_eval_options;

HDRGAN_API hdrgan_eval_options hdrgan_eval_defaults(void);
HDRGAN_API hdrgan_status hdrgan_evaluate(const char* sequence_index, const char* prediction_dir,
                                         const hdrgan_eval_options* options, const char* report_path,
                                         double* mean_psnr, double* mean_ssim);

/* Trains and evaluates with and without denoisers; writes work_dir/ablation.json. */
HDRGAN_API hdrgan_status hdrgan_ablate(const hdrgan_config* config, const hdrgan_manifest* manifest,
                                       const char* work_dir, const char* log_path, double* delta_psnr,
                                       double* delta_ssim);

/* Loss-curve and per-frame metric plots plus metrics.csv and summary.json. */
HDRGAN_API hdrgan_status hdrgan_render_report(const char* const* logs, size_t log_count,
                                              const char* const* evaluations, size_t evaluation_count,
                                              const char* out_dir);

/* Buffer utilities on interleaved float data. */
HDRGAN_API hdrgan_status hdrgan_tonemap(const float* hdr, float* out, size_t count, float mu);
HDRGAN_API hdrgan_status hdrgan_inverse_tonemap(const float* tonemapped, float* out, size_t count, float mu);
/* Inputs in [0, 1]; identical inputs give the 99 dB cap. */
HDRGAN_API hdrgan_status hdrgan_psnr(const float* gt, const float* pred, size_t count, double* out);
HDRGAN_API hdrgan_status hdrgan_ssim(const float* gt, const float* pred, int height, int width, int channels,
                                     double* out);

#ifdef __cplusplus
}
#endif

#endif /* HDRGAN_HDRGAN_H_ */
