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

#include "hdrgan/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "hdrgan/common/error.hpp"

namespace hdrgan::report {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const cv::Scalar kPalette[] = {{180, 119, 31}, {14, 127, 255}, {44, 160, 44},  {40, 39, 214},
                               {189, 103, 148}, {75, 86, 140}, {194, 119, 227}, {127, 127, 127}};

std::string Tick(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

Series& Get(std::map<std::string, Series>& m, const std::string& name) {
  auto& s = m[name];
  s.name = name;
  return s;
}

}  // namespace

LossCurves ReadLossCurves(const fs::path& log_path) {
  std::ifstream in(log_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open training log " + log_path.string());
  std::map<std::string, Series> den, gan;
  LossCurves curves;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string event = j.value("event", "");
    if (event == "denoiser_epoch") {
      auto& s = Get(den, "denoiser_" + j.at("role").get<std::string>());
      s.x.push_back(j.at("epoch").get<double>());
      s.y.push_back(j.at("loss").get<double>());
    } else if (event == "step") {
      const double step = j.at("step").get<double>();
      for (const char* term : {"g_loss", "d_loss", "adv", "content", "style", "l1", "reg"}) {
        if (!j.contains(term)) continue;
        auto& s = Get(gan, term);
        s.x.push_back(step);
        s.y.push_back(j.at(term).get<double>());
      }
    } else if (event == "stage_transition") {
      curves.stage_transitions.push_back(j.at("step").get<int>());
    }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, log_path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& [_, s] : den) curves.denoiser.push_back(std::move(s));
  for (auto& [_, s] : gan) curves.gan.push_back(std::move(s));
  return curves;
}

void PlotSeries(const fs::path& path, const std::string& title, const std::vector<Series>& series,
                const PlotOptions& options) {
  const int w = options.width, h = options.height;
  const int left = 80, right = 170, top = 40, bottom = 50;
  cv::Mat img(h, w, CV_8UC3, cv::Scalar(255, 255, 255));

  auto ty = [&](double v) { return options.log_y ? std::log10(std::max(v, 1e-12)) : v; };
  double x0 = std::numeric_limits<double>::max(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const int pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + static_cast<int>(std::lround((x - x0) / (x1 - x0) * pw)); };
  auto py = [&](double y) { return top + ph - static_cast<int>(std::lround((ty(y) - y0) / (y1 - y0) * ph)); };

  const cv::Scalar black(0, 0, 0), grid(225, 225, 225);
  const int font = cv::FONT_HERSHEY_SIMPLEX;
  for (int k = 0; k <= 5; ++k) {
    const double fy = y0 + (y1 - y0) * k / 5.0;
    const int yy = top + ph - ph * k / 5;
    cv::line(img, {left, yy}, {left + pw, yy}, grid, 1);
    cv::putText(img, Tick(options.log_y ? std::pow(10.0, fy) : fy), {4, yy + 4}, font, 0.4, black, 1, cv::LINE_AA);
    const double fx = x0 + (x1 - x0) * k / 5.0;
    const int xx = left + pw * k / 5;
    cv::line(img, {xx, top}, {xx, top + ph}, grid, 1);
    cv::putText(img, Tick(fx), {xx - 12, top + ph + 18}, font, 0.4, black, 1, cv::LINE_AA);
  }
  cv::rectangle(img, {left, top}, {left + pw, top + ph}, black, 1);
  cv::putText(img, title, {left, top - 14}, font, 0.6, black, 1, cv::LINE_AA);

  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const cv::Scalar color = kPalette[k % std::size(kPalette)];
    std::vector<cv::Point> pts;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.y[i])) pts.emplace_back(px(s.x[i]), py(s.y[i]));
    }
    if (pts.size() == 1) cv::circle(img, pts[0], 3, color, cv::FILLED, cv::LINE_AA);
    if (pts.size() > 1) cv::polylines(img, pts, false, color, 1, cv::LINE_AA);
    const int ly = top + 10 + 20 * static_cast<int>(k);
    cv::line(img, {w - right + 12, ly}, {w - right + 36, ly}, color, 2);
    cv::putText(img, s.name, {w - right + 42, ly + 4}, font, 0.45, black, 1, cv::LINE_AA);
  }
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), img)) throw Error(ErrorCode::kIo, "cannot write plot " + path.string());
}

std::string MetricsTable(const std::vector<metrics::EvaluationReport>& reports) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "sequence,frame_index,psnr_db,ssim,hdr_vdp2\n";
  for (const auto& r : reports) {
    for (const auto& f : r.frames) {
      out << r.sequence << ',' << f.frame_index << ',' << f.psnr << ',' << f.ssim << ',';
      if (f.hdr_vdp2) out << *f.hdr_vdp2;
      out << '\n';
    }
  }
  return out.str();
}

ReportOutputs RenderReport(const ReportInputs& inputs, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  ReportOutputs out;
  json summary = {{"schema", "hdrgan.summary/1"}, {"logs", json::array()}, {"sequences", json::array()}};

  for (const auto& log : inputs.logs) {
    const LossCurves curves = ReadLossCurves(log);
    json entry = {{"path", log.string()}, {"stage_transitions", curves.stage_transitions}};
    const std::string stem = inputs.logs.size() > 1 ? "_" + log.stem().string() : "";
    if (!curves.denoiser.empty()) {
      out.files.push_back(out_dir / ("denoiser_loss" + stem + ".png"));
      PlotSeries(out.files.back(), "denoiser training loss per epoch", curves.denoiser, {.log_y = true});
      for (const auto& s : curves.denoiser) entry["final_" + s.name] = s.y.back();
    }
    if (!curves.gan.empty()) {
      out.files.push_back(out_dir / ("gan_loss" + stem + ".png"));
      PlotSeries(out.files.back(), "GAN loss terms per step", curves.gan, {.log_y = true});
      for (const auto& s : curves.gan) entry["final_" + s.name] = s.y.back();
      entry["steps"] = curves.gan.front().x.size();
    }
    summary["logs"].push_back(entry);
  }

  std::vector<metrics::EvaluationReport> reports;
  for (const auto& path : inputs.evaluations) {
    reports.push_back(metrics::LoadReport(path));
    const auto& r = reports.back();
    Series psnr{"psnr_db", {}, {}}, ssim{"ssim_x100", {}, {}};
    for (const auto& f : r.frames) {
      psnr.x.push_back(f.frame_index);
      psnr.y.push_back(f.psnr);
      ssim.x.push_back(f.frame_index);
      ssim.y.push_back(100.0 * f.ssim);
    }
    std::string name = r.sequence.empty() ? path.stem().string() : r.sequence;
    std::replace_if(name.begin(), name.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-'; }, '_');
    out.files.push_back(out_dir / ("frames_" + name + ".png"));
    PlotSeries(out.files.back(), "per-frame metrics: " + r.sequence, {psnr, ssim});
    summary["sequences"].push_back(
        {{"sequence", r.sequence}, {"frames", r.frames.size()}, {"mean_psnr", r.mean_psnr}, {"mean_ssim", r.mean_ssim}});
  }
  if (!reports.empty()) {
    out.files.push_back(out_dir / "metrics.csv");
    std::ofstream(out.files.back()) << MetricsTable(reports);
  }
  if (out.files.empty()) throw Error(ErrorCode::kInvalidArgument, "report: no training logs or evaluation reports given");
  out.files.push_back(out_dir / "summary.json");
  std::ofstream(out.files.back()) << summary.dump(2) << '\n';
  return out;
}

}  // namespace hdrgan::report
