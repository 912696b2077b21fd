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

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace hdrgan {

// Four-tap bilinear footprint of a sample position, with clamp-to-edge.
// Pixel (x, y) is sampled at (x + dx, y + dy).
struct BilinearTap {
  size_t i00, i01, i10, i11;  // row-major pixel indices (y*W + x)
  double w00, w01, w10, w11;
};

inline BilinearTap MakeBilinearTap(double sx, double sy, int width, int height) {
  sx = std::clamp(sx, 0.0, static_cast<double>(width - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(height - 1));
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const size_t w = static_cast<size_t>(width);
  return {y0 * w + x0,
          y0 * w + x1,
          y1 * w + x0,
          y1 * w + x1,
          (1.0 - fx) * (1.0 - fy),
          fx * (1.0 - fy),
          (1.0 - fx) * fy,
          fx * fy};
}

}  // namespace hdrgan
