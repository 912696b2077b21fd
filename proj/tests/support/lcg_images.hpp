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

// Regenerates the image pairs of tools/reference/metrics_reference.py.

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>

#include "hdrgan/common/raster.hpp"

namespace hdrgan::testing {

class Lcg {
 public:
  explicit Lcg(uint32_t seed) : state_(seed) {}
  double Next() {
    state_ = state_ * 1664525u + 1013904223u;
    return state_ / 4294967296.0;
  }

 private:
  uint32_t state_;
};

inline std::pair<Raster, Raster> LcgPair(int i) {
  const int h = 24 + i, w = 30 + 2 * i;
  Lcg rng(1000 + i);
  Raster gt(h, w, 3), pred(h, w, 3);
  for (float& v : gt.data()) v = static_cast<float>(rng.Next());
  const float amp = static_cast<float>(0.05 + 0.025 * i);
  for (size_t k = 0; k < pred.size(); ++k) {
    const float noise = static_cast<float>(rng.Next());
    pred.data()[k] = std::clamp(gt.data()[k] + amp * (2.0f * noise - 1.0f), 0.0f, 1.0f);
  }
  return {gt, pred};
}

// {psnr_db, ssim} from scikit-image for LcgPair(0..19).
inline constexpr std::array<std::array<double, 2>, 20> kLcgReference = {{
    {30.832084930926, 0.994851590940},
    {27.344319751306, 0.989099124312},
    {25.110049592097, 0.981306607303},
    {23.098155701054, 0.969989975464},
    {21.677097562417, 0.959538179967},
    {20.220776763844, 0.941580095597},
    {19.224410434608, 0.928548040026},
    {18.191337177957, 0.909132345539},
    {17.368166517310, 0.894055922606},
    {16.602719536168, 0.866528115900},
    {15.925722419655, 0.847925043535},
    {15.212382855700, 0.825230523343},
    {14.773635557824, 0.809861900432},
    {14.155547382199, 0.779107830905},
    {13.717492301966, 0.763216107192},
    {13.247577706808, 0.744134459075},
    {12.809642141160, 0.718276684170},
    {12.491684881244, 0.708150650036},
    {11.993117685078, 0.670249965789},
    {11.697720753785, 0.653895442230},
}};

}  // namespace hdrgan::testing
