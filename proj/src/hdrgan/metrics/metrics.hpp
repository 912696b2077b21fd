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
#include <optional>
#include <string>
#include <vector>

#include "hdrgan/common/raster.hpp"
#include "hdrgan/radiometry/radiometry.hpp"
#include "json.hpp"

namespace hdrgan::metrics {

inline constexpr double kPsnrCapDb = 99.0;
inline constexpr const char* kReportSchema = "hdrgan.report/1";

double Mse(const Raster& gt, const Raster& pred);

struct PsnrOptions {
  double peak = 1.0;         // data peak; values are rescaled to the 255 convention
  bool cap = true;           // MSE = 0 gives cap_db, otherwise +inf
  double cap_db = kPsnrCapDb;
};

double PsnrFromMse(double mse, const PsnrOptions& options = {});
double Psnr(const Raster& gt, const Raster& pred, const PsnrOptions& options = {});

// Mean local SSIM over positions where the 11x11 Gaussian window (sigma 1.5)
// fits entirely, averaged over channels. K1 = 0.01, K2 = 0.03.
double Ssim(const Raster& gt, const Raster& pred, double data_range = 1.0);

enum class MetricDomain { kTonemapped, kLinear };

MetricDomain ParseDomain(const std::string& name);
const char* DomainName(MetricDomain d);

struct EvalOptions {
  int border_px = 10;
  float mu = radiometry::kDefaultMu;
  MetricDomain domain = MetricDomain::kTonemapped;
  float hdr_scale = 1.0f;  // linear frames are divided by this before tonemapping
  PsnrOptions psnr;
};

struct FrameMetrics {
  int frame_index = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> hdr_vdp2;  // filled from external tools only

  bool operator==(const FrameMetrics&) const = default;
};

struct EvaluationReport {
  std::string sequence;
  int border_px = 10;
  double mu = radiometry::kDefaultMu;
  std::string domain = "tonemapped";
  std::vector<FrameMetrics> frames;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  nlohmann::json metadata = nlohmann::json::object();

  bool operator==(const EvaluationReport&) const = default;
};

void Recompute(EvaluationReport& report);

EvaluationReport EvaluateSequence(const std::vector<radiometry::LinearHDRFrame>& gt,
                                  const std::vector<radiometry::LinearHDRFrame>& pred,
                                  const EvalOptions& options = {});

nlohmann::json ReportToJson(const EvaluationReport& report);
EvaluationReport ReportFromJson(const nlohmann::json& j);
void SaveReport(const std::filesystem::path& path, const EvaluationReport& report);
EvaluationReport LoadReport(const std::filesystem::path& path);

// Columns: frame_index,psnr_db,ssim,hdr_vdp2 (last empty unless merged).
std::string ReportCsv(const EvaluationReport& report);

}  // namespace hdrgan::metrics
