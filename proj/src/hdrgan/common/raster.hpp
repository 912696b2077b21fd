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
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hdrgan/common/error.hpp"

namespace hdrgan {

// Interleaved H x W x C raster. Row-major, channel fastest.
template <typename T>
class BasicRaster {
 public:
  BasicRaster() = default;
  BasicRaster(int height, int width, int channels, T fill = T(0))
      : height_(height), width_(width), channels_(channels) {
    Require(height >= 0 && width >= 0 && channels > 0,
            ErrorCode::kInvalidArgument, "raster dimensions must be positive");
    data_.assign(static_cast<size_t>(height) * width * channels, fill);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int y, int x, int c) {
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  const T& at(int y, int x, int c) const {
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }

  bool same_shape(const BasicRaster& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }

  bool operator==(const BasicRaster& o) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<T> data_;
};

using Raster = BasicRaster<float>;

inline std::string ShapeString(int h, int w, int c) {
  return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

template <typename T>
std::string ShapeString(const BasicRaster<T>& r) {
  return ShapeString(r.height(), r.width(), r.channels());
}

template <typename A, typename B>
void RequireSameShape(const BasicRaster<A>& a, const BasicRaster<B>& b,
                      const char* what) {
  if (a.height() != b.height() || a.width() != b.width() ||
      a.channels() != b.channels()) {
    Fail(ErrorCode::kShapeMismatch, std::string(what) + ": shape " +
                                        ShapeString(a) + " vs " + ShapeString(b));
  }
}

// Crops a window; bounds are checked.
template <typename T>
BasicRaster<T> CropRaster(const BasicRaster<T>& src, int top, int left,
                          int height, int width) {
  Require(top >= 0 && left >= 0 && height > 0 && width > 0 &&
              top + height <= src.height() && left + width <= src.width(),
          ErrorCode::kInvalidArgument, "crop window out of bounds");
  BasicRaster<T> out(height, width, src.channels());
  const int c = src.channels();
  for (int y = 0; y < height; ++y) {
    const T* row = &src.at(top + y, left, 0);
    std::copy(row, row + static_cast<size_t>(width) * c, &out.at(y, 0, 0));
  }
  return out;
}

}  // namespace hdrgan
