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
#include <optional>
#include <string>
#include <vector>

#include "hdrgan/radiometry/radiometry.hpp"
#include "json.hpp"

namespace hdrgan::dataio {

inline constexpr const char* kManifestSchema = "hdrgan.manifest/1";
inline constexpr const char* kSequenceSchema = "hdrgan.sequence/1";

enum class Split { kTrain, kTest };

const char* SplitName(Split s);
Split ParseSplit(const std::string& name);

struct ExposureSchedule {
  std::vector<float> exposure_times = {1.0f, 8.0f};  // one alternation period
  float gamma = radiometry::kDefaultGamma;

  int period() const { return static_cast<int>(exposure_times.size()); }
  float time_for(int frame_index) const { return exposure_times[frame_index % period()]; }
  bool operator==(const ExposureSchedule&) const = default;
};

// t_low = 1, t_high = 2^stops.
ExposureSchedule ScheduleFromStops(double stops);

struct SceneEntry {
  std::string id;
  Split split = Split::kTrain;
  std::vector<std::string> frames;  // relative to the manifest root, temporal order
  bool operator==(const SceneEntry&) const = default;
};

struct DatasetManifest {
  std::string root;
  std::vector<SceneEntry> scenes;
  float hdr_scale = 1.0f;
  ExposureSchedule schedule;
  radiometry::NoiseSpec noise;

  std::vector<const SceneEntry*> scenes_in(Split s) const;
  bool operator==(const DatasetManifest& o) const;
};

void Validate(const DatasetManifest& m);

struct IngestOptions {
  int test_count = 3;
  ExposureSchedule schedule;
  radiometry::NoiseSpec noise;
  double scale_quantile = 0.999;
};

// Per-scene subdirectories of HDR frames in lexicographic order. The last
// `test_count` scenes (by name) form the test split.
DatasetManifest Ingest(const std::filesystem::path& root, const IngestOptions& options = {});

nlohmann::json ManifestToJson(const DatasetManifest& m);
// Unknown fields are accepted and reported through `warnings`.
DatasetManifest ManifestFromJson(const nlohmann::json& j, std::vector<std::string>* warnings);
std::string SerializeManifest(const DatasetManifest& m);
DatasetManifest ParseManifest(const std::string& text, std::vector<std::string>* warnings);
void SaveManifest(const std::filesystem::path& path, const DatasetManifest& m);
DatasetManifest LoadManifest(const std::filesystem::path& path,
                             std::vector<std::string>* warnings = nullptr);

// Normalized (divided by hdr_scale, clamped to [0,1]) frames of one scene.
std::vector<radiometry::LinearHDRFrame> LoadSceneFrames(const DatasetManifest& m,
                                                        const SceneEntry& scene);

// Clean LDR of frame `frame_index` under the manifest's schedule.
radiometry::LDRFrame CleanLdr(const DatasetManifest& m, const radiometry::LinearHDRFrame& hdr,
                              int frame_index);

// Noise realization for one frame of one scene; fixed by (noise seed, scene, frame).
radiometry::NoiseSample NoisyLdr(const DatasetManifest& m, const radiometry::LDRFrame& clean,
                                 const std::string& scene_id, int frame_index);

struct PatchSpec {
  int patch_size = 256;
  int patches_per_frame = 4;
  uint64_t seed = 0;
};

void Validate(const PatchSpec& p);

struct SampleOptions {
  std::optional<PatchSpec> patch;  // full frames when empty
  bool add_noise = true;
};

struct SequenceSample {
  radiometry::LDRFrame reference_ldr;   // frame i
  radiometry::LDRFrame neighbor_ldr;    // frame i - 1
  radiometry::LDRFrame reference_clean;
  radiometry::LDRFrame neighbor_clean;
  radiometry::LinearHDRFrame gt_hdr;    // frame i, normalized
  std::string scene_id;
  int frame_index = 0;
  int patch_index = -1;
  int top = 0;
  int left = 0;
};

// Yields one sample per consecutive pair (i-1, i) and patch, scene by scene.
class SampleStream {
 public:
  SampleStream(const DatasetManifest& manifest, Split split, SampleOptions options = {});
  bool Next(SequenceSample& out);
  void Reset();

 private:
  void LoadScene();

  const DatasetManifest& manifest_;
  std::vector<const SceneEntry*> scenes_;
  SampleOptions options_;
  size_t scene_ = 0;
  int frame_ = 1;
  int patch_ = 0;
  std::vector<radiometry::LinearHDRFrame> hdr_;
  std::vector<radiometry::LDRFrame> clean_;
  std::vector<radiometry::LDRFrame> noisy_;
};

std::vector<SequenceSample> CollectSamples(const DatasetManifest& manifest, Split split,
                                           const SampleOptions& options = {});

// A materialized LDR sequence: noisy 16-bit PNG frames plus optional ground truth.
struct SequenceFrame {
  std::string ldr;  // relative to the index file's directory
  std::string gt;   // may be empty
  float exposure_time = 1.0f;
  int exposure_index = 0;
  float gamma = radiometry::kDefaultGamma;
  bool operator==(const SequenceFrame&) const = default;
};

struct LdrSequence {
  std::string scene_id;
  float hdr_scale = 1.0f;
  std::vector<SequenceFrame> frames;
  bool operator==(const LdrSequence&) const = default;
};

void SaveSequence(const std::filesystem::path& index_path, const LdrSequence& seq);
LdrSequence LoadSequence(const std::filesystem::path& index_path);
std::vector<radiometry::LDRFrame> LoadSequenceLdr(const std::filesystem::path& index_path,
                                                  const LdrSequence& seq);

// Writes out_dir/<scene>/{ldr_NNNN.png, gt_NNNN.exr, sequence.json} for every
// scene in the split; returns the index paths.
std::vector<std::filesystem::path> MaterializeSequences(const DatasetManifest& m, Split split,
                                                        const std::filesystem::path& out_dir,
                                                        bool add_noise = true);

struct SyntheticOptions {
  int width = 128;
  int height = 96;
  int frames = 8;
  uint64_t seed = 0;
  double max_motion_px = 1.5;  // per frame, camera pan
  double max_object_motion_px = 2.0;  // per frame; both zero renders a static scene
};

// Procedural HDR video: textured background with a wide radiance range, bright
// light sources, a panning camera and an independently moving object.
std::vector<radiometry::LinearHDRFrame> RenderSyntheticScene(const SyntheticOptions& options,
                                                             int scene_index);

// root/scene_NN/frame_NNNN.exr
void WriteSyntheticDataset(const std::filesystem::path& root, int scene_count,
                           const SyntheticOptions& options);

}  // namespace hdrgan::dataio
