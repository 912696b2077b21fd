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

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hdrgan/hdrgan.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: check failed: %s (%s)\n", __FILE__, __LINE__, #cond, hdrgan_last_error()); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static int events = 0;
static void on_event(const char* line, void* user) {
  (void)user;
  if (line[0] == '{') ++events;
}

static void test_errors(void) {
  hdrgan_manifest* m = NULL;
  CHECK(hdrgan_manifest_ingest("/nonexistent/hdrgan", NULL, &m) == HDRGAN_IO);
  CHECK(m == NULL);
  CHECK(strstr(hdrgan_last_error(), "/nonexistent/hdrgan") != NULL);
  CHECK(hdrgan_config_load(NULL, NULL) == HDRGAN_INVALID_ARGUMENT);
  CHECK(strcmp(hdrgan_status_name(HDRGAN_PARSE), "parse error") == 0);
  CHECK(strlen(hdrgan_version()) > 0);
}

static void test_config(void) {
  hdrgan_config* c = NULL;
  char* text = NULL;
  CHECK(hdrgan_config_default(&c) == HDRGAN_OK);
  CHECK(hdrgan_config_merge_json(c, "{\"stage1_epochs\": 3, \"generator\": {\"base_channels\": 8}}") == HDRGAN_OK);
  CHECK(hdrgan_config_to_json(c, &text) == HDRGAN_OK);
  CHECK(strstr(text, "\"stage1_epochs\": 3") != NULL);
  CHECK(strstr(text, "\"n_resblocks\": 8") != NULL);
  hdrgan_string_free(text);
  CHECK(hdrgan_config_merge_json(c, "{\"stage1_batch\": 0}") == HDRGAN_CONFIG);
  CHECK(hdrgan_config_merge_json(c, "{not json") == HDRGAN_PARSE);
  CHECK(hdrgan_config_merge_json(c, "[1]") == HDRGAN_CONFIG);
  hdrgan_config_free(c);
}

static void test_buffers(void) {
  const float hdr[4] = {0.0f, 0.01f, 0.5f, 1.0f};
  float tm[4], back[4];
  double v = 0.0;
  CHECK(hdrgan_tonemap(hdr, tm, 4, 5000.0f) == HDRGAN_OK);
  CHECK(tm[0] == 0.0f && fabsf(tm[3] - 1.0f) < 1e-6f);
  CHECK(tm[1] < tm[2]);
  CHECK(hdrgan_inverse_tonemap(tm, back, 4, 5000.0f) == HDRGAN_OK);
  for (int i = 0; i < 4; ++i) CHECK(fabsf(back[i] - hdr[i]) < 1e-5f);
  CHECK(hdrgan_tonemap(hdr, tm, 4, 0.0f) == HDRGAN_INVALID_ARGUMENT);

  CHECK(hdrgan_psnr(hdr, hdr, 4, &v) == HDRGAN_OK && v == 99.0);
  {
    float a[16], b[16];
    for (int i = 0; i < 16; ++i) {
      a[i] = 0.5f;
      b[i] = 0.5f + 1.0f / 255.0f;
    }
    CHECK(hdrgan_psnr(a, b, 16, &v) == HDRGAN_OK);
    CHECK(fabs(v - 10.0 * log10(65025.0)) < 1e-3);
  }
  {
    float img[24 * 24];
    for (int i = 0; i < 24 * 24; ++i) img[i] = (float)((i * 37) % 101) / 100.0f;
    CHECK(hdrgan_ssim(img, img, 24, 24, 1, &v) == HDRGAN_OK && fabs(v - 1.0) < 1e-12);
    CHECK(hdrgan_ssim(img, img, 0, 24, 1, &v) == HDRGAN_INVALID_ARGUMENT);
  }
}

static void test_dataset(const char* dir) {
  char root[512], manifest_path[512], seq[512];
  hdrgan_synth_options so = hdrgan_synth_defaults();
  hdrgan_ingest_options io = hdrgan_ingest_defaults();
  hdrgan_manifest* m = NULL;
  hdrgan_manifest* back = NULL;
  int n = -1;

  snprintf(root, sizeof root, "%s/data", dir);
  snprintf(manifest_path, sizeof manifest_path, "%s/manifest.json", dir);
  snprintf(seq, sizeof seq, "%s/seq", dir);
  so.width = 48;
  so.height = 40;
  so.frames = 3;
  CHECK(hdrgan_synthesize(root, 3, &so) == HDRGAN_OK);
  io.test_count = 1;
  CHECK(hdrgan_manifest_ingest(root, &io, &m) == HDRGAN_OK);
  CHECK(hdrgan_manifest_scene_count(m, HDRGAN_SPLIT_TRAIN, &n) == HDRGAN_OK && n == 2);
  CHECK(hdrgan_manifest_scene_count(m, HDRGAN_SPLIT_TEST, &n) == HDRGAN_OK && n == 1);
  CHECK(hdrgan_manifest_save(m, manifest_path) == HDRGAN_OK);
  CHECK(hdrgan_manifest_load(manifest_path, &back) == HDRGAN_OK);
  CHECK(hdrgan_materialize(back, HDRGAN_SPLIT_TEST, 1, seq, &n) == HDRGAN_OK && n == 1);
  CHECK(hdrgan_materialize(back, (hdrgan_split)7, 1, seq, &n) == HDRGAN_INVALID_ARGUMENT);
  io.test_count = 3;
  hdrgan_manifest_free(m);
  m = NULL;
  CHECK(hdrgan_manifest_ingest(root, &io, &m) == HDRGAN_CONFIG);
  hdrgan_manifest_free(back);
}

static void test_training(const char* dir) {
  char root[512], den[512], gan[512], log[512];
  hdrgan_ingest_options io = hdrgan_ingest_defaults();
  hdrgan_manifest* m = NULL;
  hdrgan_config* c = NULL;
  hdrgan_train_summary summary;

  snprintf(root, sizeof root, "%s/data", dir);
  snprintf(den, sizeof den, "%s/den", dir);
  snprintf(gan, sizeof gan, "%s/gan", dir);
  snprintf(log, sizeof log, "%s/train.jsonl", dir);
  io.test_count = 1;
  CHECK(hdrgan_manifest_ingest(root, &io, &m) == HDRGAN_OK);
  CHECK(hdrgan_config_default(&c) == HDRGAN_OK);
  const hdrgan_status merged = hdrgan_config_merge_json(c,
                                 "{\"denoiser_epochs\": 1, \"denoiser\": {\"depth\": 1, \"base_channels\": 8},"
                                 " \"generator\": {\"base_channels\": 4}, \"discriminator\": {\"base_channels\": 4},"
                                 " \"stage1_epochs\": 1, \"stage1_batch\": 2, \"stage2_epochs\": 0,"
                                 " \"gan_patch\": 32, \"feature_extractor\": \"pointwise\", \"flow_backend\": \"zero\"}");
  CHECK(merged == HDRGAN_OK);
  if (merged != HDRGAN_OK) return;
  CHECK(hdrgan_train_gan(c, m, den, gan, NULL, 0, NULL, NULL) == HDRGAN_IO);
  hdrgan_set_event_callback(on_event, NULL);
  CHECK(hdrgan_train_denoisers(c, m, den, log) == HDRGAN_OK);
  CHECK(hdrgan_train_gan(c, m, den, gan, NULL, 0, log, &summary) == HDRGAN_OK);
  CHECK(summary.steps > 0 && summary.stage2_first_step == -1);
  CHECK(isfinite(summary.final_g_loss));
  CHECK(events > 0);
  hdrgan_set_event_callback(NULL, NULL);
  hdrgan_config_free(c);
  hdrgan_manifest_free(m);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    fprintf(stderr, "usage: test_capi <scratch-dir>\n");
    return 2;
  }
  test_errors();
  test_config();
  test_buffers();
  test_dataset(argv[1]);
  test_training(argv[1]);
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
