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
#include <string>
#include <vector>

#include "hdrgan/metrics/metrics.hpp"

namespace hdrgan::report {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LossCurves {
  std::vector<Series> denoiser;  // per-epoch loss, one series per role
  std::vector<Series> gan;       // per-step loss terms
  std::vector<int> stage_transitions;
};

// Reads a training event stream (JSONL). Lines that are not step or epoch events are skipped.
LossCurves ReadLossCurves(const std::filesystem::path& log_path);

struct PlotOptions {
  int width = 900;
  int height = 500;
  bool log_y = false;
};

// Line chart with axes, tick labels and a legend. Writes any format cv::imwrite supports.
void PlotSeries(const std::filesystem::path& path, const std::string& title, const std::vector<Series>& series,
                const PlotOptions& options = {});

struct ReportInputs {
  std::vector<std::filesystem::path> logs;
  std::vector<std::filesystem::path> evaluations;
};

struct ReportOutputs {
  std::vector<std::filesystem::path> files;
};

// Writes denoiser_loss.png, gan_loss.png, frames_<sequence>.png, metrics.csv and summary.json
// for whichever inputs are present. Fails if nothing could be rendered.
ReportOutputs RenderReport(const ReportInputs& inputs, const std::filesystem::path& out_dir);

// Columns: sequence,frame_index,psnr_db,ssim,hdr_vdp2. The last column is empty unless merged.
std::string MetricsTable(const std::vector<metrics::EvaluationReport>& reports);

}  // namespace hdrgan::report
