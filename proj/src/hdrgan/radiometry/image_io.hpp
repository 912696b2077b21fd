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

#include "hdrgan/radiometry/radiometry.hpp"

namespace hdrgan::radiometry {

// Linear HDR frames: OpenEXR (.exr, 32-bit float RGB) or Radiance (.hdr/.pic).
LinearHDRFrame ReadHdrFrame(const std::filesystem::path& path);
void WriteHdrFrame(const std::filesystem::path& path, const LinearHDRFrame& frame);

bool IsHdrFrameFile(const std::filesystem::path& path);

// 16-bit PNG, RGB, values mapped linearly between [0,65535] and [0,1].
Raster ReadPng16(const std::filesystem::path& path);
void WritePng16(const std::filesystem::path& path, const Raster& rgb);

}  // namespace hdrgan::radiometry
