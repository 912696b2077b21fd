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

// hdrgan: command-line front end over the C API.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "hdrgan/hdrgan.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Failure {
  hdrgan_status status;
};

void Check(hdrgan_status s, const std::string& what) {
  if (s == HDRGAN_OK) return;
  std::cerr << "error: " << what << ": " << hdrgan_last_error() << " (" << hdrgan_status_name(s) << ")\n";
  throw Failure{s};
}

const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// Owns a handle and releases it with the matching _free function.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};
using Config = Handle<hdrgan_config, hdrgan_config_free>;
using Manifest = Handle<hdrgan_manifest, hdrgan_manifest_free>;

json DefaultConfig() {
  Config c;
  Check(hdrgan_config_default(&c.p), "default config");
  char* text = nullptr;
  Check(hdrgan_config_to_json(c.p, &text), "default config");
  json j = json::parse(text);
  hdrgan_string_free(text);
  return j;
}

// Training flags shared by train-denoiser, train and ablate. Every flag maps to one
// config field; only flags given on the command line override the config file.
class TrainFlags {
 public:
  void Add(CLI::App* cmd, const std::vector<std::string>& keys) {
    static const json defaults = DefaultConfig();
    cmd->add_option("--config", config_path_, "JSON training configuration; flags override its fields")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed_, "Seed for every random choice in this command")
        ->default_val(defaults.at("seed").get<uint64_t>());
    for (const auto& key : keys) {
      const json& d = defaults.at(key);
      auto& v = values_[key];
      v.key = key;
      const std::string flag = "--" + Dashed(key);
      if (d.is_boolean()) {
        v.text = d.get<bool>() ? "true" : "false";
        v.option = cmd->add_option(flag, v.text, Help(key))->check(CLI::IsMember({"true", "false"}))->type_name("BOOL");
      } else if (d.is_string()) {
        v.text = d.get<std::string>();
        v.option = cmd->add_option(flag, v.text, Help(key))->type_name("TEXT");
      } else {
        v.text = d.dump();
        v.option = cmd->add_option(flag, v.text, Help(key))->check(CLI::Number)->type_name("NUM");
      }
      v.option->capture_default_str();
      v.is_string = d.is_string();
    }
    seed_option_ = cmd->get_option("--seed");
  }

  // config file, then HDRGAN_DEVICE, then flags.
  void Build(Config& config) const {
    if (config_path_.empty()) {
      Check(hdrgan_config_default(&config.p), "config");
    } else {
      Check(hdrgan_config_load(config_path_.c_str(), &config.p), "loading config " + config_path_);
    }
    json patch = json::object();
    if (const char* device = std::getenv("HDRGAN_DEVICE"); device && *device) patch["device"] = device;
    if (seed_option_->count() > 0) patch["seed"] = seed_;
    for (const auto& [key, v] : values_) {
      if (v.option->count() == 0) continue;
      patch[key] = v.is_string ? json(v.text) : json::parse(v.text);
    }
    Check(hdrgan_config_merge_json(config.p, patch.dump().c_str()), "applying command-line overrides");
  }

 private:
  struct Value {
    std::string key;
    std::string text;
    bool is_string = false;
    CLI::Option* option = nullptr;
  };

  static std::string Dashed(std::string s) {
    for (char& c : s) c = c == '_' ? '-' : c;
    return s;
  }
  static std::string Help(const std::string& key) {
    static const std::map<std::string, std::string> help = {
        {"denoiser_epochs", "Denoiser training epochs"},
        {"denoiser_batch", "Denoiser patches per step"},
        {"denoiser_patch", "Denoiser patch side in pixels"},
        {"stage1_epochs", "GAN epochs under the reconstruction loss"},
        {"stage1_batch", "Stage-1 batch size"},
        {"stage2_epochs", "Fine-tuning epochs with temporal regularization"},
        {"stage2_batch", "Stage-2 batch size"},
        {"gan_patch", "GAN training patch side in pixels"},
        {"gan_patches_per_frame", "Patches cut from every training frame"},
        {"learning_rate", "Adam learning rate"},
        {"max_steps", "Stop after this many GAN steps (0: no limit)"},
        {"checkpoint_every", "Write a numbered checkpoint every N steps (0: off)"},
        {"feature_extractor", "Feature network for content and style losses"},
        {"flow_backend", "Optical flow backend"},
        {"use_denoiser", "Run the exposure-specific denoisers before alignment"},
        {"add_noise", "Corrupt LDR inputs with sensor noise"},
        {"device", "Compute device (also HDRGAN_DEVICE)"},
    };
    auto it = help.find(key);
    return it == help.end() ? key : it->second;
  }

  std::string config_path_;
  uint64_t seed_ = 0;
  CLI::Option* seed_option_ = nullptr;
  std::map<std::string, Value> values_;
};

void PrintEvent(const char* line, void* user) {
  const bool verbose = *static_cast<bool*>(user);
  const json e = json::parse(line, nullptr, false);
  if (e.is_discarded()) return;
  const std::string kind = e.value("event", "");
  if (kind == "step" && !verbose) return;
  json shown = e;
  shown.erase("time");
  std::cerr << shown.dump() << '\n';
}

std::vector<fs::path> SequenceIndices(const fs::path& dir) {
  std::vector<fs::path> out;
  if (fs::exists(dir / "sequence.json")) out.push_back(dir / "sequence.json");
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory() && fs::exists(e.path() / "sequence.json")) out.push_back(e.path() / "sequence.json");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDR video reconstruction from alternating-exposure LDR sequences"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", hdrgan_version());
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print every training step");

  const std::vector<std::string> denoiser_keys = {"denoiser_epochs", "denoiser_batch", "denoiser_patch",
                                                  "learning_rate", "device"};
  const std::vector<std::string> gan_keys = {"stage1_epochs", "stage1_batch",     "stage2_epochs",
                                             "stage2_batch",  "gan_patch",        "gan_patches_per_frame",
                                             "learning_rate", "max_steps",        "checkpoint_every",
                                             "feature_extractor", "flow_backend", "use_denoiser",
                                             "device"};
  std::vector<std::string> ablate_keys = gan_keys;
  for (const char* k : {"denoiser_epochs", "denoiser_batch", "denoiser_patch", "add_noise"}) ablate_keys.push_back(k);
  std::erase(ablate_keys, "use_denoiser");

  // synth
  auto* synth = app.add_subcommand("synth", "Render a procedural HDR video dataset");
  const hdrgan_synth_options sd = hdrgan_synth_defaults();
  std::string synth_out;
  int synth_scenes = 2, synth_w = sd.width, synth_h = sd.height, synth_frames = sd.frames;
  double synth_motion = sd.max_motion_px;
  uint64_t synth_seed = sd.seed;
  synth->add_option("out", synth_out, "Output root (one directory per scene)")->required();
  synth->add_option("--scenes", synth_scenes, "Number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--width", synth_w, "Frame width");
  synth->add_option("--height", synth_h, "Frame height");
  synth->add_option("--frames", synth_frames, "Frames per scene");
  synth->add_option("--motion", synth_motion, "Maximum camera pan per frame in pixels");
  synth->add_option("--seed", synth_seed, "Scene generator seed");

  // prepare-data
  auto* prep = app.add_subcommand("prepare-data", "Scan an HDR frame tree and write a dataset manifest");
  const hdrgan_ingest_options id = hdrgan_ingest_defaults();
  std::string prep_root, prep_out = "manifest.json";
  int prep_test = id.test_count;
  double prep_stops = id.stops;
  std::pair<double, double> prep_sigma{id.sigma_min, id.sigma_max};
  uint64_t prep_seed = id.seed;
  prep->add_option("root", prep_root, "Directory of scene subdirectories with HDR frames")->required();
  prep->add_option("-o,--out", prep_out, "Manifest path");
  prep->add_option("--test-count", prep_test, "Scenes held out for testing (last by name)");
  prep->add_option("--stops", prep_stops, "Exposure gap in stops between alternating frames");
  prep->add_option("--sigma-range", prep_sigma, "Noise standard deviation range MIN MAX")
      ->default_str(CLI::detail::to_string(prep_sigma.first) + " " + CLI::detail::to_string(prep_sigma.second));
  prep->add_option("--seed", prep_seed, "Noise seed");

  // materialize
  auto* mat = app.add_subcommand("materialize", "Write LDR input sequences with ground truth for a split");
  std::string mat_manifest, mat_out, mat_split = "test";
  bool mat_clean = false;
  mat->add_option("--manifest", mat_manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  mat->add_option("-o,--out", mat_out, "Output directory")->required();
  mat->add_option("--split", mat_split, "Split to write")->check(CLI::IsMember({"train", "test"}));
  mat->add_flag("--clean", mat_clean, "Skip noise injection");

  // train-denoiser
  auto* tden = app.add_subcommand("train-denoiser", "Train the low- and high-exposure denoisers");
  TrainFlags tden_flags;
  std::string tden_manifest, tden_out, tden_log;
  tden->add_option("--manifest", tden_manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  tden->add_option("-o,--out", tden_out, "Checkpoint directory")->required();
  tden->add_option("--log", tden_log, "Event log (JSON lines); default <out>/train_denoiser.jsonl");
  tden_flags.Add(tden, denoiser_keys);

  // train
  auto* train = app.add_subcommand("train", "Train the generator and discriminator with frozen denoisers");
  TrainFlags train_flags;
  std::string train_manifest, train_den, train_out, train_resume, train_log;
  int64_t train_stop = 0;
  train->add_option("--manifest", train_manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  train->add_option("--denoisers", train_den, "Directory with denoiser_low.ckpt and denoiser_high.ckpt")->required();
  train->add_option("-o,--out", train_out, "Checkpoint directory")->required();
  train->add_option("--resume", train_resume, "Continue from a GAN checkpoint")->check(CLI::ExistingFile);
  train->add_option("--stop-after", train_stop, "Pause after this many steps in this invocation (0: run to end)");
  train->add_option("--log", train_log, "Event log (JSON lines); default <out>/train.jsonl");
  train_flags.Add(train, gan_keys);

  // infer
  auto* infer = app.add_subcommand("infer", "Reconstruct HDR frames for one or more LDR sequences");
  std::string infer_ckpt, infer_seq, infer_out, infer_log;
  infer->add_option("--checkpoint", infer_ckpt, "GAN checkpoint")->required()->check(CLI::ExistingFile);
  infer->add_option("--sequence", infer_seq, "sequence.json, or a directory of sequences")->required()
      ->check(CLI::ExistingPath);
  infer->add_option("-o,--out", infer_out, "Output directory")->required();
  infer->add_option("--log", infer_log, "Event log (JSON lines)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score predictions against ground truth");
  const hdrgan_eval_options ed = hdrgan_eval_defaults();
  std::string eval_seq, eval_pred, eval_out;
  int eval_border = ed.border_px;
  double eval_mu = ed.mu;
  bool eval_linear = false, eval_first = false;
  eval->add_option("--sequence", eval_seq, "sequence.json, or a directory of sequences")->required()
      ->check(CLI::ExistingPath);
  eval->add_option("--prediction", eval_pred, "Directory written by infer")->required()->check(CLI::ExistingDirectory);
  eval->add_option("-o,--out", eval_out, "Report path (one sequence) or directory (several)")->required();
  eval->add_option("--border", eval_border, "Pixels cropped from every side before scoring");
  eval->add_option("--mu", eval_mu, "Tonemapping compression");
  eval->add_flag("--linear", eval_linear, "Score linear radiance instead of tonemapped values");
  eval->add_flag("--include-first", eval_first, "Also score frame 0, which has no previous frame");

  // ablate
  auto* abl = app.add_subcommand("ablate", "Compare the pipeline with and without denoisers");
  TrainFlags abl_flags;
  std::string abl_manifest, abl_out, abl_log;
  abl->add_option("--manifest", abl_manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  abl->add_option("-o,--out", abl_out, "Work directory; receives ablation.json")->required();
  abl->add_option("--log", abl_log, "Event log (JSON lines); default <out>/ablate.jsonl");
  abl_flags.Add(abl, ablate_keys);

  // report
  auto* rep = app.add_subcommand("report", "Plot loss curves and per-frame metrics");
  std::vector<std::string> rep_logs, rep_evals;
  std::string rep_out;
  rep->add_option("--log", rep_logs, "Training event logs")->check(CLI::ExistingFile);
  rep->add_option("--eval", rep_evals, "Evaluation reports")->check(CLI::ExistingFile);
  rep->add_option("-o,--out", rep_out, "Output directory")->required();

  // config
  auto* cfg = app.add_subcommand("config", "Print the effective training configuration");
  TrainFlags cfg_flags;
  std::string cfg_out;
  cfg->add_option("-o,--out", cfg_out, "Write to this file instead of stdout");
  cfg_flags.Add(cfg, ablate_keys);

  CLI11_PARSE(app, argc, argv);
  hdrgan_set_event_callback(PrintEvent, &verbose);

  try {
    if (*synth) {
      hdrgan_synth_options o = sd;
      o.width = synth_w;
      o.height = synth_h;
      o.frames = synth_frames;
      o.max_motion_px = synth_motion;
      o.seed = synth_seed;
      Check(hdrgan_synthesize(synth_out.c_str(), synth_scenes, &o), "synth");
      std::cout << "wrote " << synth_scenes << " scenes to " << synth_out << '\n';
    } else if (*prep) {
      hdrgan_ingest_options o = id;
      o.test_count = prep_test;
      o.stops = prep_stops;
      o.sigma_min = prep_sigma.first;
      o.sigma_max = prep_sigma.second;
      o.seed = prep_seed;
      Manifest m;
      Check(hdrgan_manifest_ingest(prep_root.c_str(), &o, &m.p), "prepare-data");
      Check(hdrgan_manifest_save(m.p, prep_out.c_str()), "prepare-data");
      int train_n = 0, test_n = 0;
      Check(hdrgan_manifest_scene_count(m.p, HDRGAN_SPLIT_TRAIN, &train_n), "prepare-data");
      Check(hdrgan_manifest_scene_count(m.p, HDRGAN_SPLIT_TEST, &test_n), "prepare-data");
      std::cout << "manifest " << prep_out << ": " << train_n << " train scenes, " << test_n << " test scenes\n";
    } else if (*mat) {
      Manifest m;
      Check(hdrgan_manifest_load(mat_manifest.c_str(), &m.p), "materialize");
      int n = 0;
      Check(hdrgan_materialize(m.p, mat_split == "train" ? HDRGAN_SPLIT_TRAIN : HDRGAN_SPLIT_TEST, mat_clean ? 0 : 1,
                               mat_out.c_str(), &n),
            "materialize");
      std::cout << "wrote " << n << " sequences to " << mat_out << '\n';
    } else if (*tden) {
      Config c;
      tden_flags.Build(c);
      Manifest m;
      Check(hdrgan_manifest_load(tden_manifest.c_str(), &m.p), "train-denoiser");
      fs::create_directories(tden_out);
      const std::string log = tden_log.empty() ? (fs::path(tden_out) / "train_denoiser.jsonl").string() : tden_log;
      Check(hdrgan_train_denoisers(c.p, m.p, tden_out.c_str(), log.c_str()), "train-denoiser");
      Check(hdrgan_config_save(c.p, (fs::path(tden_out) / "config.json").c_str()), "train-denoiser");
      std::cout << "denoisers written to " << tden_out << '\n';
    } else if (*train) {
      Config c;
      train_flags.Build(c);
      Manifest m;
      Check(hdrgan_manifest_load(train_manifest.c_str(), &m.p), "train");
      fs::create_directories(train_out);
      const std::string log = train_log.empty() ? (fs::path(train_out) / "train.jsonl").string() : train_log;
      hdrgan_train_summary s{};
      Check(hdrgan_train_gan(c.p, m.p, train_den.c_str(), train_out.c_str(), OrNull(train_resume), train_stop,
                             log.c_str(), &s),
            "train");
      Check(hdrgan_config_save(c.p, (fs::path(train_out) / "config.json").c_str()), "train");
      std::cout << "trained " << s.steps << " steps; checkpoint " << (fs::path(train_out) / "gan.ckpt").string()
                << '\n';
    } else if (*infer) {
      const auto indices = SequenceIndices(infer_seq);
      if (indices.empty() && fs::is_regular_file(infer_seq)) {
        int n = 0;
        Check(hdrgan_infer(infer_ckpt.c_str(), infer_seq.c_str(), infer_out.c_str(), OrNull(infer_log), &n), "infer");
        std::cout << "wrote " << n << " frames to " << infer_out << '\n';
      } else if (indices.empty()) {
        std::cerr << "error: infer: no sequence.json under " << infer_seq << '\n';
        return HDRGAN_IO;
      } else {
        const bool single = indices.size() == 1 && indices[0] == fs::path(infer_seq) / "sequence.json";
        for (const auto& idx : indices) {
          const fs::path out = single ? fs::path(infer_out) : fs::path(infer_out) / idx.parent_path().filename();
          int n = 0;
          Check(hdrgan_infer(infer_ckpt.c_str(), idx.c_str(), out.c_str(), OrNull(infer_log), &n), "infer");
          std::cout << "wrote " << n << " frames to " << out.string() << '\n';
        }
      }
    } else if (*eval) {
      hdrgan_eval_options o = ed;
      o.border_px = eval_border;
      o.mu = eval_mu;
      o.linear_domain = eval_linear ? 1 : 0;
      o.include_first = eval_first ? 1 : 0;
      std::vector<std::pair<fs::path, fs::path>> jobs;  // (sequence index, prediction dir)
      if (fs::is_regular_file(eval_seq)) {
        jobs.emplace_back(eval_seq, eval_pred);
      } else {
        const auto indices = SequenceIndices(eval_seq);
        const bool single = indices.size() == 1 && indices[0] == fs::path(eval_seq) / "sequence.json";
        for (const auto& idx : indices) {
          jobs.emplace_back(idx, single ? fs::path(eval_pred) : fs::path(eval_pred) / idx.parent_path().filename());
        }
      }
      if (jobs.empty()) {
        std::cerr << "error: evaluate: no sequence.json under " << eval_seq << '\n';
        return HDRGAN_IO;
      }
      for (const auto& [idx, pred] : jobs) {
        fs::path out = eval_out;
        if (jobs.size() > 1) {
          fs::create_directories(eval_out);
          out = fs::path(eval_out) / (idx.parent_path().filename().string() + ".json");
        } else if (out.has_parent_path()) {
          fs::create_directories(out.parent_path());
        }
        double psnr = 0.0, ssim = 0.0;
        Check(hdrgan_evaluate(idx.c_str(), pred.c_str(), &o, out.c_str(), &psnr, &ssim), "evaluate");
        std::cout << idx.parent_path().filename().string() << ": PSNR " << psnr << " dB, SSIM " << ssim << " -> "
                  << out.string() << '\n';
      }
    } else if (*abl) {
      Config c;
      abl_flags.Build(c);
      Manifest m;
      Check(hdrgan_manifest_load(abl_manifest.c_str(), &m.p), "ablate");
      fs::create_directories(abl_out);
      const std::string log = abl_log.empty() ? (fs::path(abl_out) / "ablate.jsonl").string() : abl_log;
      double dp = 0.0, ds = 0.0;
      Check(hdrgan_ablate(c.p, m.p, abl_out.c_str(), log.c_str(), &dp, &ds), "ablate");
      std::cout << "with minus without denoiser: PSNR " << dp << " dB, SSIM " << ds << "; see "
                << (fs::path(abl_out) / "ablation.json").string() << '\n';
    } else if (*rep) {
      std::vector<const char*> logs, evals;
      for (const auto& s : rep_logs) logs.push_back(s.c_str());
      for (const auto& s : rep_evals) evals.push_back(s.c_str());
      Check(hdrgan_render_report(logs.data(), logs.size(), evals.data(), evals.size(), rep_out.c_str()), "report");
      std::cout << "report written to " << rep_out << '\n';
    } else if (*cfg) {
      Config c;
      cfg_flags.Build(c);
      if (cfg_out.empty()) {
        char* text = nullptr;
        Check(hdrgan_config_to_json(c.p, &text), "config");
        std::cout << text << '\n';
        hdrgan_string_free(text);
      } else {
        Check(hdrgan_config_save(c.p, cfg_out.c_str()), "config");
      }
    }
  } catch (const Failure& f) {
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return HDRGAN_INTERNAL;
  }
  return 0;
}
