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

#include "hdrgan/radiometry/image_io.hpp"

#include <ImfChannelList.h>
#include <ImfFrameBuffer.h>
#include <ImfHeader.h>
#include <ImfInputFile.h>
#include <ImfOutputFile.h>

#include <algorithm>
#include <cmath>
#include <opencv2/imgcodecs.hpp>
#include <string>

namespace hdrgan::radiometry {
namespace fs = std::filesystem;
namespace {

std::string LowerExt(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

LinearHDRFrame ReadExr(const fs::path& path) {
  try {
    Imf::InputFile file(path.c_str());
    const Imath::Box2i dw = file.header().dataWindow();
    const int width = dw.max.x - dw.min.x + 1;
    const int height = dw.max.y - dw.min.y + 1;
    LinearHDRFrame frame{Raster(height, width, 3)};
    float* base = frame.data.data().data();
    const size_t xs = 3 * sizeof(float);
    const size_t ys = xs * width;
    char* origin = reinterpret_cast<char*>(base) -
                   (static_cast<ptrdiff_t>(dw.min.x) * xs + static_cast<ptrdiff_t>(dw.min.y) * ys);
    Imf::FrameBuffer fb;
    const char* names[3] = {"R", "G", "B"};
    for (int c = 0; c < 3; ++c) {
      fb.insert(names[c], Imf::Slice(Imf::FLOAT, origin + c * sizeof(float), xs, ys, 1, 1, 0.0));
    }
    file.setFrameBuffer(fb);
    file.readPixels(dw.min.y, dw.max.y);
    return frame;
  } catch (const std::exception& e) {
    Fail(ErrorCode::kIo, "cannot read OpenEXR file '" + path.string() + "': " + e.what());
  }
}

void WriteExr(const fs::path& path, const LinearHDRFrame& frame) {
  const int width = frame.data.width();
  const int height = frame.data.height();
  try {
    Imf::Header header(width, height);
    header.channels().insert("R", Imf::Channel(Imf::FLOAT));
    header.channels().insert("G", Imf::Channel(Imf::FLOAT));
    header.channels().insert("B", Imf::Channel(Imf::FLOAT));
    Imf::OutputFile file(path.c_str(), header);
    Imf::FrameBuffer fb;
    char* base = reinterpret_cast<char*>(const_cast<float*>(frame.data.data().data()));
    const size_t xs = 3 * sizeof(float);
    const size_t ys = xs * width;
    const char* names[3] = {"R", "G", "B"};
    for (int c = 0; c < 3; ++c) {
      fb.insert(names[c], Imf::Slice(Imf::FLOAT, base + c * sizeof(float), xs, ys));
    }
    file.setFrameBuffer(fb);
    file.writePixels(height);
  } catch (const std::exception& e) {
    Fail(ErrorCode::kIo, "cannot write OpenEXR file '" + path.string() + "': " + e.what());
  }
}

LinearHDRFrame ReadRadiance(const fs::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  Require(!m.empty(), ErrorCode::kIo, "cannot read Radiance file '" + path.string() + "'");
  Require(m.type() == CV_32FC3, ErrorCode::kIo,
          "Radiance file '" + path.string() + "' did not decode to float RGB");
  LinearHDRFrame frame{Raster(m.rows, m.cols, 3)};
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<cv::Vec3f>(y);
    for (int x = 0; x < m.cols; ++x) {
      for (int c = 0; c < 3; ++c) frame.data.at(y, x, c) = row[x][2 - c];
    }
  }
  return frame;
}

void WriteRadiance(const fs::path& path, const LinearHDRFrame& frame) {
  cv::Mat m(frame.data.height(), frame.data.width(), CV_32FC3);
  for (int y = 0; y < m.rows; ++y) {
    auto* row = m.ptr<cv::Vec3f>(y);
    for (int x = 0; x < m.cols; ++x) {
      for (int c = 0; c < 3; ++c) row[x][2 - c] = frame.data.at(y, x, c);
    }
  }
  Require(cv::imwrite(path.string(), m), ErrorCode::kIo,
          "cannot write Radiance file '" + path.string() + "'");
}

}  // namespace

bool IsHdrFrameFile(const fs::path& path) {
  const std::string e = LowerExt(path);
  return e == ".exr" || e == ".hdr" || e == ".pic";
}

LinearHDRFrame ReadHdrFrame(const fs::path& path) {
  Require(fs::exists(path), ErrorCode::kIo, "no such file: '" + path.string() + "'");
  const std::string e = LowerExt(path);
  LinearHDRFrame frame;
  if (e == ".exr") {
    frame = ReadExr(path);
  } else if (e == ".hdr" || e == ".pic") {
    frame = ReadRadiance(path);
  } else {
    Fail(ErrorCode::kIo, "unsupported HDR extension '" + e + "' for '" + path.string() + "'");
  }
  for (float& v : frame.data.data()) {
    if (!std::isfinite(v)) {
      Fail(ErrorCode::kIo, "non-finite radiance in '" + path.string() + "'");
    }
    v = std::max(v, 0.0f);
  }
  return frame;
}

void WriteHdrFrame(const fs::path& path, const LinearHDRFrame& frame) {
  Validate(frame);
  const std::string e = LowerExt(path);
  if (e == ".exr") {
    WriteExr(path, frame);
  } else if (e == ".hdr" || e == ".pic") {
    WriteRadiance(path, frame);
  } else {
    Fail(ErrorCode::kIo, "unsupported HDR extension '" + e + "' for '" + path.string() + "'");
  }
}

Raster ReadPng16(const fs::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  Require(!m.empty(), ErrorCode::kIo, "cannot read PNG '" + path.string() + "'");
  Require(m.depth() == CV_16U && m.channels() == 3, ErrorCode::kIo,
          "PNG '" + path.string() + "' is not 16-bit RGB");
  Raster out(m.rows, m.cols, 3);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<cv::Vec3w>(y);
    for (int x = 0; x < m.cols; ++x) {
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = row[x][2 - c] / 65535.0f;
    }
  }
  return out;
}

void WritePng16(const fs::path& path, const Raster& rgb) {
  Require(rgb.channels() == 3, ErrorCode::kInvalidArgument, "PNG writer expects RGB");
  cv::Mat m(rgb.height(), rgb.width(), CV_16UC3);
  for (int y = 0; y < m.rows; ++y) {
    auto* row = m.ptr<cv::Vec3w>(y);
    for (int x = 0; x < m.cols; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = std::clamp(rgb.at(y, x, c), 0.0f, 1.0f);
        row[x][2 - c] = static_cast<uint16_t>(std::lround(v * 65535.0f));
      }
    }
  }
  Require(cv::imwrite(path.string(), m), ErrorCode::kIo, "cannot write PNG '" + path.string() + "'");
}

}  // namespace hdrgan::radiometry
