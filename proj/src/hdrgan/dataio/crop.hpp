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

#include "hdrgan/common/raster.hpp"

namespace hdrgan::dataio {

// Removes border_px pixels from every side.
template <typename T>
BasicRaster<T> CropBorder(const BasicRaster<T>& frame, int border_px) {
  Require(border_px >= 0, ErrorCode::kInvalidArgument, "crop_border: negative border");
  Require(2 * border_px < std::min(frame.height(), frame.width()), ErrorCode::kInvalidArgument,
          "crop_border: border " + std::to_string(border_px) + " too large for " +
              ShapeString(frame));
  if (border_px == 0) return frame;
  return CropRaster(frame, border_px, border_px, frame.height() - 2 * border_px,
                    frame.width() - 2 * border_px);
}

}  // namespace hdrgan::dataio
