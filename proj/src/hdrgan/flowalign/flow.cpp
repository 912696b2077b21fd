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

#include "hdrgan/flowalign/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "hdrgan/common/bilinear.hpp"

namespace hdrgan::flowalign {
namespace {

struct Plane {
  int h = 0;
  int w = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(int h_, int w_) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, 0.0) {}
  double& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
  double clamped(int y, int x) const {
    return at(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
  }
};

Plane ToGray(const Raster& r) {
  Plane p(r.height(), r.width());
  const int c = r.channels();
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      double s = 0.0;
      for (int k = 0; k < c; ++k) s += r.at(y, x, k);
      p.at(y, x) = s / c;
    }
  }
  return p;
}

Plane SeparableFilter(const Plane& in, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size() / 2);
  Plane tmp(in.h, in.w), out(in.h, in.w);
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < in.w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += taps[k + r] * in.clamped(y, x + k);
      tmp.at(y, x) = s;
    }
  }
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < in.w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += taps[k + r] * tmp.clamped(y + k, x);
      out.at(y, x) = s;
    }
  }
  return out;
}

std::vector<double> GaussianTaps(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> t(2 * r + 1);
  double s = 0.0;
  for (int k = -r; k <= r; ++k) s += t[k + r] = std::exp(-0.5 * k * k / (sigma * sigma));
  for (double& e : t) e /= s;
  return t;
}

Plane Downsample(const Plane& in) {
  static const std::vector<double> kBinomial = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  Plane blurred = SeparableFilter(in, kBinomial);
  Plane out((in.h + 1) / 2, (in.w + 1) / 2);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) out.at(y, x) = blurred.clamped(2 * y, 2 * x);
  }
  return out;
}

double Sample(const Plane& p, double sx, double sy) {
  const BilinearTap t = MakeBilinearTap(sx, sy, p.w, p.h);
  return t.w00 * p.v[t.i00] + t.w01 * p.v[t.i01] + t.w10 * p.v[t.i10] + t.w11 * p.v[t.i11];
}

// Flow at a finer level from the next coarser one.
void UpsampleFlow(const Plane& cu, const Plane& cv, Plane& u, Plane& v) {
  for (int y = 0; y < u.h; ++y) {
    for (int x = 0; x < u.w; ++x) {
      const double sx = (x + 0.5) / 2.0 - 0.5;
      const double sy = (y + 0.5) / 2.0 - 0.5;
      u.at(y, x) = 2.0 * Sample(cu, sx, sy);
      v.at(y, x) = 2.0 * Sample(cv, sx, sy);
    }
  }
}

}  // namespace

void Validate(const FlowField& flow) {
  Require(flow.data.channels() == 2, ErrorCode::kInvalidArgument, "FlowField must have 2 channels");
  for (float f : flow.data.data()) {
    Require(std::isfinite(f), ErrorCode::kNumeric, "FlowField contains non-finite values");
  }
}

PyramidalFlowBackend::PyramidalFlowBackend(PyramidalFlowOptions options) : options_(options) {
  Require(options_.levels >= 1 && options_.levels <= 8, ErrorCode::kConfig,
          "pyramidal flow: levels must be in [1, 8]");
  Require(options_.iterations >= 1, ErrorCode::kConfig, "pyramidal flow: iterations must be >= 1");
  Require(options_.window_sigma > 0.0 && options_.regularization > 0.0, ErrorCode::kConfig,
          "pyramidal flow: window sigma and regularization must be positive");
}

FlowField PyramidalFlowBackend::Estimate(const Raster& reference, const Raster& neighbor) const {
  Require(reference.height() == neighbor.height() && reference.width() == neighbor.width(),
          ErrorCode::kShapeMismatch,
          "estimate_flow: reference " + ShapeString(reference) + " vs neighbor " +
              ShapeString(neighbor));
  std::vector<Plane> ref_pyr{ToGray(reference)};
  std::vector<Plane> nbr_pyr{ToGray(neighbor)};
  while (static_cast<int>(ref_pyr.size()) < options_.levels &&
         std::min(ref_pyr.back().h, ref_pyr.back().w) >= 16) {
    ref_pyr.push_back(Downsample(ref_pyr.back()));
    nbr_pyr.push_back(Downsample(nbr_pyr.back()));
  }
  const auto window = GaussianTaps(options_.window_sigma);
  Plane u, v;
  for (int level = static_cast<int>(ref_pyr.size()) - 1; level >= 0; --level) {
    const Plane& ref = ref_pyr[level];
    const Plane& nbr = nbr_pyr[level];
    Plane nu(ref.h, ref.w), nv(ref.h, ref.w);
    if (!u.v.empty()) UpsampleFlow(u, v, nu, nv);
    u = std::move(nu);
    v = std::move(nv);
    for (int it = 0; it < options_.iterations; ++it) {
      Plane warped(ref.h, ref.w);
      for (int y = 0; y < ref.h; ++y) {
        for (int x = 0; x < ref.w; ++x) warped.at(y, x) = Sample(nbr, x + u.at(y, x), y + v.at(y, x));
      }
      Plane ixx(ref.h, ref.w), ixy(ref.h, ref.w), iyy(ref.h, ref.w), ixt(ref.h, ref.w),
          iyt(ref.h, ref.w);
      for (int y = 0; y < ref.h; ++y) {
        for (int x = 0; x < ref.w; ++x) {
          const double gx = 0.25 * (warped.clamped(y, x + 1) - warped.clamped(y, x - 1) +
                                    ref.clamped(y, x + 1) - ref.clamped(y, x - 1));
          const double gy = 0.25 * (warped.clamped(y + 1, x) - warped.clamped(y - 1, x) +
                                    ref.clamped(y + 1, x) - ref.clamped(y - 1, x));
          const double gt = warped.at(y, x) - ref.at(y, x);
          ixx.at(y, x) = gx * gx;
          ixy.at(y, x) = gx * gy;
          iyy.at(y, x) = gy * gy;
          ixt.at(y, x) = gx * gt;
          iyt.at(y, x) = gy * gt;
        }
      }
      ixx = SeparableFilter(ixx, window);
      ixy = SeparableFilter(ixy, window);
      iyy = SeparableFilter(iyy, window);
      ixt = SeparableFilter(ixt, window);
      iyt = SeparableFilter(iyt, window);
      const double lambda = options_.regularization;
      for (size_t i = 0; i < u.v.size(); ++i) {
        const double a = ixx.v[i] + lambda, b = ixy.v[i], d = iyy.v[i] + lambda;
        const double det = a * d - b * b;
        const double du = (-d * ixt.v[i] + b * iyt.v[i]) / det;
        const double dv = (b * ixt.v[i] - a * iyt.v[i]) / det;
        u.v[i] += std::clamp(du, -options_.max_step, options_.max_step);
        v.v[i] += std::clamp(dv, -options_.max_step, options_.max_step);
      }
    }
  }
  FlowField flow = FlowField::Zero(reference.height(), reference.width());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      flow.data.at(y, x, 0) = static_cast<float>(u.at(y, x));
      flow.data.at(y, x, 1) = static_cast<float>(v.at(y, x));
    }
  }
  return flow;
}

FlowField ZeroFlowBackend::Estimate(const Raster& reference, const Raster& neighbor) const {
  Require(reference.height() == neighbor.height() && reference.width() == neighbor.width(),
          ErrorCode::kShapeMismatch, "estimate_flow: dimension mismatch");
  return FlowField::Zero(reference.height(), reference.width());
}

std::unique_ptr<FlowBackend> MakeFlowBackend(const std::string& name) {
  if (name == "pyramidal-lk") return std::make_unique<PyramidalFlowBackend>();
  if (name == "zero") return std::make_unique<ZeroFlowBackend>();
  Fail(ErrorCode::kConfig, "unknown flow backend '" + name + "' (expected pyramidal-lk or zero)");
}

std::pair<Raster, Raster> ExposureNormalize(const radiometry::LDRFrame& ref,
                                            const radiometry::LDRFrame& nbr) {
  Require(ref.exposure_time != nbr.exposure_time, ErrorCode::kInvalidArgument,
          "exposure_normalize: frames must have different exposure times");
  RequireSameShape(ref.data, nbr.data, "exposure_normalize");
  const auto lin_ref = radiometry::LinearizeLdr(ref);
  const auto lin_nbr = radiometry::LinearizeLdr(nbr);
  const float ceiling = std::min(1.0f / ref.exposure_time, 1.0f / nbr.exposure_time);
  auto reexpose = [&](const radiometry::LinearHDRFrame& lin) {
    radiometry::LinearHDRFrame clipped = lin;
    for (float& v : clipped.data.data()) v = std::min(v, ceiling);
    return radiometry::SimulateLdr(clipped, ref.exposure_time, ref.gamma).data;
  };
  return {reexpose(lin_ref), reexpose(lin_nbr)};
}

FlowField EstimateFlow(const FlowBackend& backend, const Raster& ref, const Raster& nbr) {
  Require(ref.height() == nbr.height() && ref.width() == nbr.width(), ErrorCode::kShapeMismatch,
          "estimate_flow: reference " + ShapeString(ref) + " vs neighbor " + ShapeString(nbr));
  FlowField flow = backend.Estimate(ref, nbr);
  Require(flow.height() == ref.height() && flow.width() == ref.width(), ErrorCode::kShapeMismatch,
          "flow backend '" + backend.name() + "' returned mismatched dims");
  Validate(flow);
  return flow;
}

Raster WarpBackward(const Raster& frame, const FlowField& flow) {
  Require(frame.height() == flow.height() && frame.width() == flow.width(),
          ErrorCode::kShapeMismatch,
          "warp_backward: frame " + ShapeString(frame) + " vs flow " + ShapeString(flow.data));
  const int h = frame.height(), w = frame.width(), c = frame.channels();
  Raster out(h, w, c);
  auto src = frame.data();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const BilinearTap t =
          MakeBilinearTap(x + static_cast<double>(flow.data.at(y, x, 0)),
                          y + static_cast<double>(flow.data.at(y, x, 1)), w, h);
      for (int k = 0; k < c; ++k) {
        out.at(y, x, k) = static_cast<float>(
            t.w00 * src[t.i00 * c + k] + t.w01 * src[t.i01 * c + k] +
            t.w10 * src[t.i10 * c + k] + t.w11 * src[t.i11 * c + k]);
      }
    }
  }
  return out;
}

AlignResult AlignNeighbor(const FlowBackend& backend, const radiometry::LDRFrame& ref,
                          const radiometry::LDRFrame& nbr) {
  auto [ref_n, nbr_n] = ExposureNormalize(ref, nbr);
  FlowField flow = EstimateFlow(backend, ref_n, nbr_n);
  radiometry::LDRFrame aligned = nbr;
  aligned.data = WarpBackward(nbr.data, flow);
  return {std::move(aligned), std::move(flow)};
}

void WriteFlowFile(const std::filesystem::path& path, const FlowField& flow) {
  Validate(flow);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write flow file '" + path.string() + "'");
  out.write("HDRGFLO1", 8);
  const int32_t dims[2] = {flow.width(), flow.height()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  const std::string conv = kFlowConvention;
  const uint32_t n = static_cast<uint32_t>(conv.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(conv.data(), n);
  auto d = flow.data.data();
  out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size_bytes()));
  Require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

FlowField ReadFlowFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open flow file '" + path.string() + "'");
  char magic[8];
  int32_t dims[2];
  uint32_t n = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  Require(in && std::memcmp(magic, "HDRGFLO1", 8) == 0 && dims[0] > 0 && dims[1] > 0 && n < 4096,
          ErrorCode::kParse, "'" + path.string() + "' is not a flow file");
  std::string conv(n, '\0');
  in.read(conv.data(), n);
  Require(conv == kFlowConvention, ErrorCode::kParse,
          "flow file '" + path.string() + "' uses unknown convention '" + conv + "'");
  FlowField flow = FlowField::Zero(dims[1], dims[0]);
  auto d = flow.data.data();
  in.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size_bytes()));
  Require(static_cast<bool>(in), ErrorCode::kParse, "flow file '" + path.string() + "' is truncated");
  return flow;
}

}  // namespace hdrgan::flowalign
