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

#include "hdrgan/metrics/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hdrgan/dataio/crop.hpp"

namespace hdrgan::metrics {

using nlohmann::json;

double Mse(const Raster& gt, const Raster& pred) {
  RequireSameShape(gt, pred, "mse");
  Require(!gt.empty(), ErrorCode::kInvalidArgument, "mse: empty raster");
  double s = 0.0;
  auto a = gt.data(), b = pred.data();
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s / a.size();
}

double PsnrFromMse(double mse, const PsnrOptions& options) {
  Require(options.peak > 0.0, ErrorCode::kInvalidArgument, "psnr: peak must be positive");
  Require(mse >= 0.0 && std::isfinite(mse), ErrorCode::kNumeric, "psnr: invalid mse");
  const double scale = 255.0 / options.peak;
  const double mse255 = mse * scale * scale;
  if (mse255 == 0.0) return options.cap ? options.cap_db : std::numeric_limits<double>::infinity();
  const double db = 10.0 * std::log10(255.0 * 255.0 / mse255);
  return options.cap ? std::min(db, options.cap_db) : db;
}

double Psnr(const Raster& gt, const Raster& pred, const PsnrOptions& options) {
  return PsnrFromMse(Mse(gt, pred), options);
}

double Ssim(const Raster& gt, const Raster& pred, double data_range) {
  RequireSameShape(gt, pred, "ssim");
  constexpr int kRadius = 5;
  constexpr double kSigma = 1.5;
  const int h = gt.height(), w = gt.width(), ch = gt.channels();
  Require(h > 2 * kRadius && w > 2 * kRadius, ErrorCode::kInvalidArgument,
          "ssim: image must be at least 11x11, got " + ShapeString(gt));
  double g[2 * kRadius + 1];
  double gs = 0.0;
  for (int k = -kRadius; k <= kRadius; ++k) gs += g[k + kRadius] = std::exp(-0.5 * k * k / (kSigma * kSigma));
  for (double& e : g) e /= gs;
  const double c1 = std::pow(0.01 * data_range, 2), c2 = std::pow(0.03 * data_range, 2);

  // Separable pass: horizontal sums of x, y, xx, yy, xy per row.
  const int ow = w - 2 * kRadius;
  std::vector<double> hz(static_cast<size_t>(5) * h * ow);
  double total = 0.0;
  for (int c = 0; c < ch; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < ow; ++x) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (int k = 0; k <= 2 * kRadius; ++k) {
          const double a = gt.at(y, x + k, c), b = pred.at(y, x + k, c);
          sx += g[k] * a;
          sy += g[k] * b;
          sxx += g[k] * a * a;
          syy += g[k] * b * b;
          sxy += g[k] * a * b;
        }
        double* o = &hz[(static_cast<size_t>(y) * ow + x) * 5];
        o[0] = sx; o[1] = sy; o[2] = sxx; o[3] = syy; o[4] = sxy;
      }
    }
    double sum = 0.0;
    for (int y = kRadius; y < h - kRadius; ++y) {
      for (int x = 0; x < ow; ++x) {
        double m[5] = {0, 0, 0, 0, 0};
        for (int k = 0; k <= 2 * kRadius; ++k) {
          const double* r = &hz[(static_cast<size_t>(y - kRadius + k) * ow + x) * 5];
          for (int q = 0; q < 5; ++q) m[q] += g[k] * r[q];
        }
        const double mx = m[0], my = m[1];
        const double vx = m[2] - mx * mx, vy = m[3] - my * my, cxy = m[4] - mx * my;
        sum += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      }
    }
    total += sum / (static_cast<double>(h - 2 * kRadius) * ow);
  }
  return total / ch;
}

MetricDomain ParseDomain(const std::string& name) {
  if (name == "tonemapped") return MetricDomain::kTonemapped;
  if (name == "linear") return MetricDomain::kLinear;
  Fail(ErrorCode::kConfig, "metric domain must be tonemapped or linear, got '" + name + "'");
}

const char* DomainName(MetricDomain d) {
  return d == MetricDomain::kTonemapped ? "tonemapped" : "linear";
}

void Recompute(EvaluationReport& report) {
  report.mean_psnr = report.mean_ssim = 0.0;
  if (report.frames.empty()) return;
  for (const auto& f : report.frames) {
    report.mean_psnr += f.psnr;
    report.mean_ssim += f.ssim;
  }
  report.mean_psnr /= report.frames.size();
  report.mean_ssim /= report.frames.size();
}

EvaluationReport EvaluateSequence(const std::vector<radiometry::LinearHDRFrame>& gt,
                                  const std::vector<radiometry::LinearHDRFrame>& pred,
                                  const EvalOptions& options) {
  Require(gt.size() == pred.size(), ErrorCode::kShapeMismatch,
          "evaluate_sequence: " + std::to_string(gt.size()) + " ground-truth frames vs " +
              std::to_string(pred.size()) + " predictions");
  Require(!gt.empty(), ErrorCode::kInvalidArgument, "evaluate_sequence: empty sequence");
  Require(options.hdr_scale > 0.0f, ErrorCode::kInvalidArgument, "evaluate_sequence: hdr_scale <= 0");
  EvaluationReport report;
  report.border_px = options.border_px;
  report.mu = options.mu;
  report.domain = DomainName(options.domain);
  for (size_t i = 0; i < gt.size(); ++i) {
    auto prep = [&](const radiometry::LinearHDRFrame& f) {
      radiometry::LinearHDRFrame n = radiometry::NormalizeHdr(
          {dataio::CropBorder(f.data, options.border_px)}, options.hdr_scale);
      return options.domain == MetricDomain::kTonemapped ? radiometry::Tonemap(n, options.mu).data
                                                         : n.data;
    };
    const Raster a = prep(gt[i]), b = prep(pred[i]);
    report.frames.push_back({static_cast<int>(i), Psnr(a, b, options.psnr), Ssim(a, b), std::nullopt});
  }
  Recompute(report);
  return report;
}

json ReportToJson(const EvaluationReport& r) {
  json frames = json::array();
  for (const auto& f : r.frames) {
    json row = {{"frame_index", f.frame_index}, {"psnr_db", f.psnr}, {"ssim", f.ssim}};
    row["hdr_vdp2"] = f.hdr_vdp2 ? json(*f.hdr_vdp2) : json(nullptr);
    frames.push_back(row);
  }
  return {{"schema", kReportSchema},
          {"sequence", r.sequence},
          {"border_px", r.border_px},
          {"mu", r.mu},
          {"domain", r.domain},
          {"summary", {{"mean_psnr_db", r.mean_psnr}, {"mean_ssim", r.mean_ssim},
                       {"frame_count", r.frames.size()}}},
          {"frames", frames},
          {"metadata", r.metadata}};
}

EvaluationReport ReportFromJson(const json& j) {
  try {
    Require(j.value("schema", "") == kReportSchema, ErrorCode::kParse,
            "report schema must be '" + std::string(kReportSchema) + "'");
    EvaluationReport r;
    r.sequence = j.at("sequence").get<std::string>();
    r.border_px = j.at("border_px").get<int>();
    r.mu = j.at("mu").get<double>();
    r.domain = j.at("domain").get<std::string>();
    for (const auto& row : j.at("frames")) {
      FrameMetrics f{row.at("frame_index").get<int>(), row.at("psnr_db").get<double>(),
                     row.at("ssim").get<double>(), std::nullopt};
      if (row.contains("hdr_vdp2") && !row["hdr_vdp2"].is_null()) f.hdr_vdp2 = row["hdr_vdp2"].get<double>();
      r.frames.push_back(f);
    }
    r.mean_psnr = j.at("summary").at("mean_psnr_db").get<double>();
    r.mean_ssim = j.at("summary").at("mean_ssim").get<double>();
    if (j.contains("metadata")) r.metadata = j["metadata"];
    return r;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
}

void SaveReport(const std::filesystem::path& path, const EvaluationReport& report) {
  std::ofstream out(path, std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write report '" + path.string() + "'");
  out << ReportToJson(report).dump(2) << "\n";
  Require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

EvaluationReport LoadReport(const std::filesystem::path& path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open report '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, "report '" + path.string() + "': " + e.what());
  }
  return ReportFromJson(j);
}

std::string ReportCsv(const EvaluationReport& report) {
  std::ostringstream os;
  os.precision(10);
  os << "frame_index,psnr_db,ssim,hdr_vdp2\n";
  for (const auto& f : report.frames) {
    os << f.frame_index << "," << f.psnr << "," << f.ssim << ",";
    if (f.hdr_vdp2) os << *f.hdr_vdp2;
    os << "\n";
  }
  return os.str();
}

}  // namespace hdrgan::metrics
