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

#include "hdrgan/dataio/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "hdrgan/common/rng.hpp"
#include "hdrgan/radiometry/image_io.hpp"

namespace hdrgan::dataio {

namespace fs = std::filesystem;
using nlohmann::json;

const char* SplitName(Split s) { return s == Split::kTrain ? "train" : "test"; }

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  Fail(ErrorCode::kParse, "split must be train or test, got '" + name + "'");
}

ExposureSchedule ScheduleFromStops(double stops) {
  Require(stops > 0.0 && stops <= 10.0, ErrorCode::kConfig,
          "exposure separation must be in (0, 10] stops");
  ExposureSchedule s;
  s.exposure_times = {1.0f, static_cast<float>(std::exp2(stops))};
  return s;
}

std::vector<const SceneEntry*> DatasetManifest::scenes_in(Split s) const {
  std::vector<const SceneEntry*> out;
  for (const auto& scene : scenes)
    if (scene.split == s) out.push_back(&scene);
  return out;
}

bool DatasetManifest::operator==(const DatasetManifest& o) const {
  return root == o.root && scenes == o.scenes && hdr_scale == o.hdr_scale &&
         schedule == o.schedule && noise.mean == o.noise.mean &&
         noise.sigma_lo == o.noise.sigma_lo && noise.sigma_hi == o.noise.sigma_hi &&
         noise.seed == o.noise.seed;
}

void Validate(const DatasetManifest& m) {
  Require(m.hdr_scale > 0.0f && std::isfinite(m.hdr_scale), ErrorCode::kConfig,
          "manifest hdr_scale must be positive");
  Require(m.schedule.period() >= 2, ErrorCode::kConfig,
          "exposure schedule needs at least two exposure times");
  for (size_t i = 0; i < m.schedule.exposure_times.size(); ++i) {
    Require(m.schedule.exposure_times[i] > 0.0f, ErrorCode::kConfig, "exposure times must be > 0");
    const float next = m.schedule.exposure_times[(i + 1) % m.schedule.exposure_times.size()];
    Require(next != m.schedule.exposure_times[i], ErrorCode::kConfig,
            "consecutive exposure times must differ");
  }
  Require(m.schedule.gamma > 0.0f, ErrorCode::kConfig, "gamma must be > 0");
  radiometry::Validate(m.noise);
  std::set<std::string> ids;
  for (const auto& s : m.scenes) {
    Require(ids.insert(s.id).second, ErrorCode::kConfig, "duplicate scene id '" + s.id + "'");
    Require(s.frames.size() >= 2, ErrorCode::kConfig,
            "scene '" + s.id + "' has fewer than 2 frames");
  }
}

namespace {

std::vector<fs::path> ListFrames(const fs::path& dir) {
  std::vector<fs::path> frames;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && radiometry::IsHdrFrameFile(e.path())) frames.push_back(e.path());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

}  // namespace

DatasetManifest Ingest(const fs::path& root, const IngestOptions& options) {
  Require(fs::is_directory(root), ErrorCode::kIo, "dataset root '" + root.string() + "' is not a directory");
  Require(options.test_count >= 0, ErrorCode::kConfig, "test_count must be >= 0");
  Require(options.scale_quantile > 0.0 && options.scale_quantile <= 1.0, ErrorCode::kConfig,
          "scale quantile must be in (0, 1]");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  Require(!dirs.empty(), ErrorCode::kIo, "dataset root '" + root.string() + "' contains no scene directories");
  Require(static_cast<int>(dirs.size()) > options.test_count, ErrorCode::kConfig,
          "dataset has " + std::to_string(dirs.size()) + " scenes; test_count " +
              std::to_string(options.test_count) + " leaves no training scene");

  DatasetManifest m;
  m.root = fs::weakly_canonical(fs::absolute(root)).string();
  m.schedule = options.schedule;
  m.noise = options.noise;
  std::vector<radiometry::LinearHDRFrame> train_frames;
  for (size_t i = 0; i < dirs.size(); ++i) {
    SceneEntry scene;
    scene.id = dirs[i].filename().string();
    scene.split = static_cast<int>(i) >= static_cast<int>(dirs.size()) - options.test_count
                      ? Split::kTest
                      : Split::kTrain;
    const auto frames = ListFrames(dirs[i]);
    Require(frames.size() >= 2, ErrorCode::kIo,
            "scene '" + scene.id + "' has " + std::to_string(frames.size()) +
                " HDR frames; at least 2 are required");
    int h = -1, w = -1;
    for (const auto& f : frames) {
      auto frame = radiometry::ReadHdrFrame(f);
      if (h < 0) {
        h = frame.data.height();
        w = frame.data.width();
      }
      Require(frame.data.height() == h && frame.data.width() == w, ErrorCode::kShapeMismatch,
              "scene '" + scene.id + "': frame '" + f.filename().string() + "' is " +
                  std::to_string(frame.data.width()) + "x" + std::to_string(frame.data.height()) +
                  ", expected " + std::to_string(w) + "x" + std::to_string(h));
      if (scene.split == Split::kTrain) train_frames.push_back(std::move(frame));
      scene.frames.push_back(fs::relative(f, dirs[i].parent_path()).generic_string());
    }
    m.scenes.push_back(std::move(scene));
  }
  const float q = radiometry::RadianceQuantile(train_frames, options.scale_quantile);
  Require(q > 0.0f, ErrorCode::kNumeric, "training split radiance quantile is zero");
  m.hdr_scale = q;
  Validate(m);
  return m;
}

json ManifestToJson(const DatasetManifest& m) {
  json scenes = json::array();
  for (const auto& s : m.scenes)
    scenes.push_back({{"id", s.id}, {"split", SplitName(s.split)}, {"frames", s.frames}});
  return {{"schema", kManifestSchema},
          {"root", m.root},
          {"hdr_scale", m.hdr_scale},
          {"schedule", {{"exposure_times", m.schedule.exposure_times}, {"gamma", m.schedule.gamma}}},
          {"noise",
           {{"mean", m.noise.mean}, {"sigma_range", {m.noise.sigma_lo, m.noise.sigma_hi}}, {"seed", m.noise.seed}}},
          {"scenes", scenes}};
}

namespace {

class FieldReader {
 public:
  FieldReader(const json& j, std::string path, std::vector<std::string>* warnings)
      : j_(j), path_(std::move(path)), warnings_(warnings) {
    Require(j.is_object(), ErrorCode::kParse, "manifest field '" + Where() + "': expected an object");
  }
  ~FieldReader() {
    if (!warnings_) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) warnings_->push_back("manifest: ignoring unknown field '" + Join(key) + "'");
    }
  }

  const json& Get(const std::string& key, json::value_t type) {
    seen_.insert(key);
    Require(j_.contains(key), ErrorCode::kParse, "manifest field '" + Join(key) + "' is missing");
    const json& v = j_.at(key);
    const bool ok = type == json::value_t::number_float ? v.is_number()
                    : type == json::value_t::number_unsigned ? v.is_number_unsigned()
                                                             : v.type() == type;
    Require(ok, ErrorCode::kParse,
            "manifest field '" + Join(key) + "': expected " + TypeName(type) + ", got " + v.type_name());
    return v;
  }
  std::string Join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string Where() const { return path_.empty() ? "<root>" : path_; }
  static std::string TypeName(json::value_t t) {
    switch (t) {
      case json::value_t::string: return "string";
      case json::value_t::array: return "array";
      case json::value_t::object: return "object";
      case json::value_t::number_unsigned: return "non-negative integer";
      default: return "number";
    }
  }
  const json& j_;
  std::string path_;
  std::vector<std::string>* warnings_;
  std::set<std::string> seen_;
};

std::vector<float> FloatArray(const json& a, const std::string& where) {
  std::vector<float> out;
  for (const auto& e : a) {
    Require(e.is_number(), ErrorCode::kParse, "manifest field '" + where + "': expected numbers");
    out.push_back(e.get<float>());
  }
  return out;
}

}  // namespace

DatasetManifest ManifestFromJson(const json& j, std::vector<std::string>* warnings) {
  DatasetManifest m;
  {
    FieldReader r(j, "", warnings);
    const auto schema = r.Get("schema", json::value_t::string).get<std::string>();
    Require(schema == kManifestSchema, ErrorCode::kParse,
            "manifest schema '" + schema + "' is not supported (expected " + kManifestSchema + ")");
    m.root = r.Get("root", json::value_t::string).get<std::string>();
    m.hdr_scale = r.Get("hdr_scale", json::value_t::number_float).get<float>();
    {
      FieldReader s(r.Get("schedule", json::value_t::object), "schedule", warnings);
      m.schedule.exposure_times =
          FloatArray(s.Get("exposure_times", json::value_t::array), "schedule.exposure_times");
      m.schedule.gamma = s.Get("gamma", json::value_t::number_float).get<float>();
    }
    {
      FieldReader n(r.Get("noise", json::value_t::object), "noise", warnings);
      m.noise.mean = n.Get("mean", json::value_t::number_float).get<float>();
      const auto range = FloatArray(n.Get("sigma_range", json::value_t::array), "noise.sigma_range");
      Require(range.size() == 2, ErrorCode::kParse, "manifest field 'noise.sigma_range': expected [lo, hi]");
      m.noise.sigma_lo = range[0];
      m.noise.sigma_hi = range[1];
      m.noise.seed = n.Get("seed", json::value_t::number_unsigned).get<uint64_t>();
    }
    const json& scenes = r.Get("scenes", json::value_t::array);
    for (size_t i = 0; i < scenes.size(); ++i) {
      const std::string where = "scenes[" + std::to_string(i) + "]";
      FieldReader s(scenes[i], where, warnings);
      SceneEntry e;
      e.id = s.Get("id", json::value_t::string).get<std::string>();
      e.split = ParseSplit(s.Get("split", json::value_t::string).get<std::string>());
      for (const auto& f : s.Get("frames", json::value_t::array)) {
        Require(f.is_string(), ErrorCode::kParse, "manifest field '" + where + ".frames': expected strings");
        e.frames.push_back(f.get<std::string>());
      }
      m.scenes.push_back(std::move(e));
    }
  }
  Validate(m);
  return m;
}

std::string SerializeManifest(const DatasetManifest& m) { return ManifestToJson(m).dump(2) + "\n"; }

DatasetManifest ParseManifest(const std::string& text, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line/column.
    const size_t pos = std::min<size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    size_t line = 1, col = 1;
    for (size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    Fail(ErrorCode::kParse, "manifest parse error at line " + std::to_string(line) + ", column " +
                                std::to_string(col) + ": " + e.what());
  }
  return ManifestFromJson(j, warnings);
}

void SaveManifest(const fs::path& path, const DatasetManifest& m) {
  Validate(m);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write manifest '" + path.string() + "'");
  out << SerializeManifest(m);
  Require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

DatasetManifest LoadManifest(const fs::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return ParseManifest(ss.str(), warnings);
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<radiometry::LinearHDRFrame> LoadSceneFrames(const DatasetManifest& m,
                                                        const SceneEntry& scene) {
  std::vector<radiometry::LinearHDRFrame> frames;
  for (const auto& f : scene.frames)
    frames.push_back(radiometry::NormalizeHdr(radiometry::ReadHdrFrame(fs::path(m.root) / f), m.hdr_scale));
  for (const auto& f : frames)
    Require(f.data.same_shape(frames.front().data), ErrorCode::kShapeMismatch,
            "scene '" + scene.id + "' mixes frame resolutions");
  return frames;
}

radiometry::LDRFrame CleanLdr(const DatasetManifest& m, const radiometry::LinearHDRFrame& hdr,
                              int frame_index) {
  return radiometry::SimulateLdr(hdr, m.schedule.time_for(frame_index), m.schedule.gamma,
                                 frame_index % m.schedule.period());
}

radiometry::NoiseSample NoisyLdr(const DatasetManifest& m, const radiometry::LDRFrame& clean,
                                 const std::string& scene_id, int frame_index) {
  radiometry::NoiseSpec spec = m.noise;
  spec.seed = DeriveSeed(m.noise.seed, {Fnv1a(scene_id), static_cast<uint64_t>(frame_index)});
  return radiometry::AddNoiseWithSigma(clean, spec);
}

void Validate(const PatchSpec& p) {
  Require(p.patch_size >= 32, ErrorCode::kConfig,
          "patch_size must be >= 32, got " + std::to_string(p.patch_size));
  Require(p.patches_per_frame >= 1, ErrorCode::kConfig, "patches_per_frame must be >= 1");
}

SampleStream::SampleStream(const DatasetManifest& manifest, Split split, SampleOptions options)
    : manifest_(manifest), scenes_(manifest.scenes_in(split)), options_(std::move(options)) {
  Validate(manifest);
  if (options_.patch) Validate(*options_.patch);
}

void SampleStream::Reset() {
  scene_ = 0;
  frame_ = 1;
  patch_ = 0;
  hdr_.clear();
}

void SampleStream::LoadScene() {
  const SceneEntry& scene = *scenes_[scene_];
  hdr_ = LoadSceneFrames(manifest_, scene);
  if (options_.patch) {
    Require(options_.patch->patch_size <= std::min(hdr_[0].data.height(), hdr_[0].data.width()),
            ErrorCode::kConfig,
            "patch_size " + std::to_string(options_.patch->patch_size) + " exceeds scene '" +
                scene.id + "' dims " + ShapeString(hdr_[0].data));
  }
  clean_.clear();
  noisy_.clear();
  for (int i = 0; i < static_cast<int>(hdr_.size()); ++i) {
    clean_.push_back(CleanLdr(manifest_, hdr_[i], i));
    noisy_.push_back(options_.add_noise ? NoisyLdr(manifest_, clean_.back(), scene.id, i).frame
                                        : clean_.back());
  }
}

bool SampleStream::Next(SequenceSample& out) {
  while (scene_ < scenes_.size()) {
    if (hdr_.empty()) LoadScene();
    if (frame_ >= static_cast<int>(hdr_.size())) {
      ++scene_;
      frame_ = 1;
      patch_ = 0;
      hdr_.clear();
      continue;
    }
    const SceneEntry& scene = *scenes_[scene_];
    out.scene_id = scene.id;
    out.frame_index = frame_;
    const int i = frame_;
    auto crop = [&](const Raster& r) {
      return out.patch_index < 0 ? r : CropRaster(r, out.top, out.left, options_.patch->patch_size,
                                                  options_.patch->patch_size);
    };
    if (options_.patch) {
      const PatchSpec& p = *options_.patch;
      Rng rng(DeriveSeed(p.seed, {Fnv1a(scene.id), static_cast<uint64_t>(i),
                                  static_cast<uint64_t>(patch_)}));
      out.patch_index = patch_;
      out.top = std::uniform_int_distribution<int>(0, hdr_[i].data.height() - p.patch_size)(rng);
      out.left = std::uniform_int_distribution<int>(0, hdr_[i].data.width() - p.patch_size)(rng);
      if (++patch_ >= p.patches_per_frame) {
        patch_ = 0;
        ++frame_;
      }
    } else {
      out.patch_index = -1;
      out.top = out.left = 0;
      ++frame_;
    }
    out.gt_hdr = {crop(hdr_[i].data)};
    out.reference_ldr = noisy_[i];
    out.reference_ldr.data = crop(noisy_[i].data);
    out.neighbor_ldr = noisy_[i - 1];
    out.neighbor_ldr.data = crop(noisy_[i - 1].data);
    out.reference_clean = clean_[i];
    out.reference_clean.data = crop(clean_[i].data);
    out.neighbor_clean = clean_[i - 1];
    out.neighbor_clean.data = crop(clean_[i - 1].data);
    return true;
  }
  return false;
}

std::vector<SequenceSample> CollectSamples(const DatasetManifest& manifest, Split split,
                                           const SampleOptions& options) {
  SampleStream stream(manifest, split, options);
  std::vector<SequenceSample> out;
  SequenceSample s;
  while (stream.Next(s)) out.push_back(s);
  return out;
}

void SaveSequence(const fs::path& index_path, const LdrSequence& seq) {
  json frames = json::array();
  for (const auto& f : seq.frames)
    frames.push_back({{"ldr", f.ldr}, {"gt", f.gt}, {"exposure_time", f.exposure_time},
                      {"exposure_index", f.exposure_index}, {"gamma", f.gamma}});
  std::ofstream out(index_path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write '" + index_path.string() + "'");
  out << json{{"schema", kSequenceSchema}, {"scene", seq.scene_id}, {"hdr_scale", seq.hdr_scale},
              {"frames", frames}}.dump(2)
      << "\n";
}

LdrSequence LoadSequence(const fs::path& index_path) {
  std::ifstream in(index_path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open sequence index '" + index_path.string() + "'");
  try {
    const json j = json::parse(in);
    Require(j.value("schema", "") == kSequenceSchema, ErrorCode::kParse,
            "'" + index_path.string() + "' is not a sequence index (schema " + kSequenceSchema + ")");
    LdrSequence seq;
    seq.scene_id = j.at("scene").get<std::string>();
    seq.hdr_scale = j.at("hdr_scale").get<float>();
    for (const auto& f : j.at("frames"))
      seq.frames.push_back({f.at("ldr").get<std::string>(), f.value("gt", ""),
                            f.at("exposure_time").get<float>(), f.at("exposure_index").get<int>(),
                            f.value("gamma", radiometry::kDefaultGamma)});
    return seq;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "sequence index '" + index_path.string() + "': " + e.what());
  }
}

std::vector<radiometry::LDRFrame> LoadSequenceLdr(const fs::path& index_path, const LdrSequence& seq) {
  std::vector<radiometry::LDRFrame> frames;
  const fs::path dir = index_path.parent_path();
  for (const auto& f : seq.frames) {
    radiometry::LDRFrame ldr{radiometry::ReadPng16(dir / f.ldr), f.exposure_time, f.exposure_index, f.gamma};
    radiometry::Validate(ldr);
    frames.push_back(std::move(ldr));
  }
  return frames;
}

std::vector<fs::path> MaterializeSequences(const DatasetManifest& m, Split split,
                                           const fs::path& out_dir, bool add_noise) {
  Validate(m);
  std::vector<fs::path> indices;
  for (const SceneEntry* scene : m.scenes_in(split)) {
    const fs::path dir = out_dir / scene->id;
    fs::create_directories(dir);
    const auto hdr = LoadSceneFrames(m, *scene);
    LdrSequence seq{scene->id, m.hdr_scale, {}};
    for (int i = 0; i < static_cast<int>(hdr.size()); ++i) {
      const auto clean = CleanLdr(m, hdr[i], i);
      const auto ldr = add_noise ? NoisyLdr(m, clean, scene->id, i).frame : clean;
      char name[32];
      std::snprintf(name, sizeof(name), "ldr_%04d.png", i);
      radiometry::WritePng16(dir / name, ldr.data);
      SequenceFrame f{name, "", ldr.exposure_time, ldr.exposure_index, ldr.gamma};
      std::snprintf(name, sizeof(name), "gt_%04d.exr", i);
      radiometry::WriteHdrFrame(dir / name, radiometry::DenormalizeHdr(hdr[i], m.hdr_scale));
      f.gt = name;
      seq.frames.push_back(f);
    }
    SaveSequence(dir / "sequence.json", seq);
    indices.push_back(dir / "sequence.json");
  }
  return indices;
}

std::vector<radiometry::LinearHDRFrame> RenderSyntheticScene(const SyntheticOptions& o,
                                                             int scene_index) {
  Require(o.width >= 32 && o.height >= 32 && o.frames >= 2, ErrorCode::kConfig,
          "synthetic scenes need at least 32x32 pixels and 2 frames");
  Rng rng(DeriveSeed(o.seed, {static_cast<uint64_t>(scene_index)}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  double amp_sum = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double f = range(0.04, 0.3), a = range(0, kTwoPi);
    waves.push_back({f * std::cos(a), f * std::sin(a), range(0, kTwoPi), range(0.5, 1.0)});
    amp_sum += waves.back().amp;
  }
  double tint[3];
  for (double& t : tint) t = range(0.6, 1.2);
  const double base = range(0.2, 0.5);

  struct Light {
    double x, y, sigma, peak;
  };
  std::vector<Light> lights;
  for (int k = 0; k < 2; ++k)
    lights.push_back({range(0.1, 0.9) * o.width, range(0.1, 0.9) * o.height, range(3.0, 7.0),
                      range(8.0, 20.0)});

  const double pan_x = range(-o.max_motion_px, o.max_motion_px);
  const double pan_y = range(-o.max_motion_px, o.max_motion_px);
  const double obj_r = range(0.1, 0.18) * std::min(o.width, o.height);
  const double obj_x = range(0.3, 0.7) * o.width, obj_y = range(0.3, 0.7) * o.height;
  const double obj_vx = range(-1.0, 1.0) * o.max_object_motion_px;
  const double obj_vy = range(-1.0, 1.0) * o.max_object_motion_px;
  const double obj_level = range(0.03, 0.3), obj_freq = range(0.3, 0.6);
  double obj_tint[3];
  for (double& t : obj_tint) t = range(0.5, 1.3);

  std::vector<radiometry::LinearHDRFrame> frames;
  for (int t = 0; t < o.frames; ++t) {
    Raster r(o.height, o.width, 3);
    const double cx = pan_x * t, cy = pan_y * t;
    const double ox = obj_x + obj_vx * t, oy = obj_y + obj_vy * t;
    for (int y = 0; y < o.height; ++y) {
      for (int x = 0; x < o.width; ++x) {
        const double sx = x + cx, sy = y + cy;  // scene coordinates
        double tex = 0.0;
        for (const Wave& w : waves) tex += w.amp * std::sin(w.fx * sx + w.fy * sy + w.phase);
        const double level = base * std::exp(1.6 * tex / amp_sum);
        double light = 0.0;
        for (const Light& l : lights) {
          const double d2 = (sx - l.x) * (sx - l.x) + (sy - l.y) * (sy - l.y);
          light += l.peak * std::exp(-0.5 * d2 / (l.sigma * l.sigma));
        }
        const double dist = std::hypot(x - ox, y - oy);
        const double cover = std::clamp(obj_r + 0.5 - dist, 0.0, 1.0);
        const double stripes = 0.5 + 0.5 * std::sin(obj_freq * ((x - ox) + 0.5 * (y - oy)));
        for (int c = 0; c < 3; ++c) {
          const double bg = level * tint[c] + light * (c == 0 ? 1.0 : c == 1 ? 0.85 : 0.6);
          const double fg = obj_level * obj_tint[c] * (0.4 + stripes);
          r.at(y, x, c) = static_cast<float>((1.0 - cover) * bg + cover * fg);
        }
      }
    }
    frames.push_back({std::move(r)});
  }
  return frames;
}

void WriteSyntheticDataset(const fs::path& root, int scene_count, const SyntheticOptions& options) {
  Require(scene_count >= 1, ErrorCode::kConfig, "scene_count must be >= 1");
  for (int s = 0; s < scene_count; ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%02d", s);
    const fs::path dir = root / name;
    fs::create_directories(dir);
    const auto frames = RenderSyntheticScene(options, s);
    for (size_t i = 0; i < frames.size(); ++i) {
      char file[32];
      std::snprintf(file, sizeof(file), "frame_%04zu.exr", i);
      radiometry::WriteHdrFrame(dir / file, frames[i]);
    }
  }
}

}  // namespace hdrgan::dataio
