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
#include <memory>
#include <string>
#include <utility>

#include "hdrgan/common/raster.hpp"
#include "hdrgan/radiometry/radiometry.hpp"

namespace hdrgan::flowalign {

// Per-pixel displacement (dx, dy) in pixels; +x is rightward, +y downward.
// A neighbor aligned by this field satisfies nbr(x + dx, y + dy) ~ ref(x, y).
struct FlowField {
  Raster data;  // H x W x 2

  static FlowField Zero(int height, int width) { return {Raster(height, width, 2)}; }
  int height() const { return data.height(); }
  int width() const { return data.width(); }
};

void Validate(const FlowField& flow);

class FlowBackend {
 public:
  virtual ~FlowBackend() = default;
  // Both rasters share dims and exposure; channel count is free.
  virtual FlowField Estimate(const Raster& reference, const Raster& neighbor) const = 0;
  virtual bool trainable() const = 0;
  virtual std::string name() const = 0;
};

struct PyramidalFlowOptions {
  int levels = 4;             // 3..5
  int iterations = 6;         // refinement passes per level
  double window_sigma = 2.0;  // Gaussian integration window
  double regularization = 1e-5;
  double max_step = 1.0;      // per-iteration update clamp, in level pixels
};

// Coarse-to-fine dense Lucas-Kanade with iterative warping. Fixed and
// non-trainable.
class PyramidalFlowBackend final : public FlowBackend {
 public:
  explicit PyramidalFlowBackend(PyramidalFlowOptions options = {});
  FlowField Estimate(const Raster& reference, const Raster& neighbor) const override;
  bool trainable() const override { return false; }
  std::string name() const override { return "pyramidal-lk"; }
  const PyramidalFlowOptions& options() const { return options_; }

 private:
  PyramidalFlowOptions options_;
};

// Returns zero flow; used for the frame-0 fallback and flow-free baselines.
class ZeroFlowBackend final : public FlowBackend {
 public:
  FlowField Estimate(const Raster& reference, const Raster& neighbor) const override;
  bool trainable() const override { return false; }
  std::string name() const override { return "zero"; }
};

std::unique_ptr<FlowBackend> MakeFlowBackend(const std::string& name);

// Brings two differently exposed frames to the reference exposure. Both are
// linearized and clipped to their shared saturation ceiling, then re-exposed
// at the reference exposure time. Returns (reference, neighbor).
std::pair<Raster, Raster> ExposureNormalize(const radiometry::LDRFrame& ref,
                                            const radiometry::LDRFrame& nbr);

FlowField EstimateFlow(const FlowBackend& backend, const Raster& ref, const Raster& nbr);

// out(x, y) = bilinear sample of frame at (x + dx, y + dy), clamped to edge.
Raster WarpBackward(const Raster& frame, const FlowField& flow);

struct AlignResult {
  radiometry::LDRFrame aligned;
  FlowField flow;
};

// exposure_normalize -> estimate_flow -> warp of the original neighbor.
AlignResult AlignNeighbor(const FlowBackend& backend, const radiometry::LDRFrame& ref,
                          const radiometry::LDRFrame& nbr);

// Debug dump: "HDRGFLO1" | i32 width | i32 height | str convention | f32 dx,dy
// interleaved.
void WriteFlowFile(const std::filesystem::path& path, const FlowField& flow);
FlowField ReadFlowFile(const std::filesystem::path& path);

inline constexpr const char* kFlowConvention = "backward;nbr(x+dx,y+dy)=ref(x,y);+x right;+y down";

}  // namespace hdrgan::flowalign
