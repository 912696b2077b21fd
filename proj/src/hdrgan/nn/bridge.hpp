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

#include <span>
#include <vector>

#include "hdrgan/common/raster.hpp"
#include "hdrgan/nn/tensor.hpp"

namespace hdrgan::nn {

// Packs same-shaped HWC rasters into one NCHW batch.
template <typename T>
Var<T> StackRasters(std::span<const Raster* const> rasters) {
  Require(!rasters.empty(), ErrorCode::kInvalidArgument, "StackRasters: empty batch");
  const Raster& first = *rasters.front();
  const int h = first.height(), w = first.width(), c = first.channels();
  std::vector<T> data(rasters.size() * static_cast<size_t>(c) * h * w);
  size_t o = 0;
  for (const Raster* r : rasters) {
    RequireSameShape(*r, first, "StackRasters");
    for (int k = 0; k < c; ++k)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) data[o++] = static_cast<T>(r->at(y, x, k));
  }
  return Var<T>::Constant({static_cast<int>(rasters.size()), c, h, w}, std::move(data));
}

template <typename T>
Var<T> StackRasters(const std::vector<Raster>& rasters) {
  std::vector<const Raster*> ptrs;
  for (const Raster& r : rasters) ptrs.push_back(&r);
  return StackRasters<T>(std::span<const Raster* const>(ptrs));
}

template <typename T>
Raster TensorToRaster(const Var<T>& t, int n) {
  Require(t.rank() == 4 && n >= 0 && n < t.dim(0), ErrorCode::kShapeMismatch,
          "TensorToRaster: bad tensor " + ShapeStr(t.shape()));
  const int c = t.dim(1), h = t.dim(2), w = t.dim(3);
  Raster r(h, w, c);
  auto v = t.value();
  size_t o = static_cast<size_t>(n) * c * h * w;
  for (int k = 0; k < c; ++k)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) r.at(y, x, k) = static_cast<float>(v[o++]);
  return r;
}

}  // namespace hdrgan::nn
