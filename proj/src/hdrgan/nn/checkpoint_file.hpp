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
#include <string>
#include <vector>

#include "hdrgan/nn/layers.hpp"
#include "json.hpp"

namespace hdrgan::nn {

// Binary container shared by every model checkpoint:
//
//   "HDRGCKPT" | u32 format version | str schema tag | str metadata JSON |
//   u32 tensor count | { str name | u32 rank | i32 dims[rank] | f32 data } |
//   u64 FNV-1a of all preceding bytes
//
// Strings are u32 length + bytes. Integers and floats are little-endian.
inline constexpr uint32_t kCheckpointFormatVersion = 1;

struct TensorRecord {
  std::string name;
  Shape shape;
  std::vector<float> data;
};

struct CheckpointFile {
  std::string schema;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<TensorRecord> tensors;

  const TensorRecord* Find(const std::string& name) const;
};

void WriteCheckpointFile(const std::filesystem::path& path, const CheckpointFile& file);
CheckpointFile ReadCheckpointFile(const std::filesystem::path& path);

// Appends params and buffers under `prefix`.
void ExportState(const StateRefs<float>& refs, const std::string& prefix, CheckpointFile& file);
void ExportBuffers(const std::vector<BufferRef<float>>& buffers, const std::string& prefix,
                   CheckpointFile& file);
// Every registered tensor must be present with a matching size.
void ImportState(const CheckpointFile& file, const std::string& prefix, StateRefs<float>& refs);
void ImportBuffers(const CheckpointFile& file, const std::string& prefix,
                   const std::vector<BufferRef<float>>& buffers);

}  // namespace hdrgan::nn
