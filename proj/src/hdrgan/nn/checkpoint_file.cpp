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

#include "hdrgan/nn/checkpoint_file.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace hdrgan::nn {
namespace {

constexpr char kMagic[8] = {'H', 'D', 'R', 'G', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void Bytes(const void* p, size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <typename U>
  void Pod(U v) {
    Bytes(&v, sizeof(U));
  }
  void Str(const std::string& s) {
    Pod<uint32_t>(static_cast<uint32_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  const std::vector<char>& buffer() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<char>& buf, size_t end, std::string path)
      : buf_(buf), end_(end), path_(std::move(path)) {}
  void Bytes(void* p, size_t n) {
    if (pos_ + n > end_) Fail(ErrorCode::kParse, "checkpoint '" + path_ + "' is truncated");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  template <typename U>
  U Pod() {
    U v;
    Bytes(&v, sizeof(U));
    return v;
  }
  std::string Str() {
    const uint32_t n = Pod<uint32_t>();
    std::string s(n, '\0');
    Bytes(s.data(), n);
    return s;
  }
  size_t pos() const { return pos_; }

 private:
  const std::vector<char>& buf_;
  size_t end_;
  std::string path_;
  size_t pos_ = 0;
};

}  // namespace

const TensorRecord* CheckpointFile::Find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void WriteCheckpointFile(const std::filesystem::path& path, const CheckpointFile& file) {
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.Pod<uint32_t>(kCheckpointFormatVersion);
  w.Str(file.schema);
  w.Str(file.metadata.dump());
  w.Pod<uint32_t>(static_cast<uint32_t>(file.tensors.size()));
  for (const auto& t : file.tensors) {
    Require(Numel(t.shape) == t.data.size(), ErrorCode::kShapeMismatch,
            "checkpoint tensor '" + t.name + "' size does not match its shape");
    w.Str(t.name);
    w.Pod<uint32_t>(static_cast<uint32_t>(t.shape.size()));
    for (int d : t.shape) w.Pod<int32_t>(d);
    w.Bytes(t.data.data(), t.data.size() * sizeof(float));
  }
  const auto& buf = w.buffer();
  const uint64_t digest =
      Fnv1a(std::span(reinterpret_cast<const unsigned char*>(buf.data()), buf.size()));
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(static_cast<bool>(out), ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.write(reinterpret_cast<const char*>(&digest), sizeof(digest));
    Require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

CheckpointFile ReadCheckpointFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open checkpoint '" + path.string() + "'");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Require(buf.size() >= sizeof(kMagic) + 8 && std::memcmp(buf.data(), kMagic, sizeof(kMagic)) == 0,
          ErrorCode::kParse, "'" + path.string() + "' is not an hdrgan checkpoint");
  const size_t body = buf.size() - sizeof(uint64_t);
  uint64_t stored;
  std::memcpy(&stored, buf.data() + body, sizeof(stored));
  const uint64_t digest =
      Fnv1a(std::span(reinterpret_cast<const unsigned char*>(buf.data()), body));
  Require(stored == digest, ErrorCode::kParse,
          "checkpoint '" + path.string() + "' failed its integrity check (truncated or corrupt)");
  Reader r(buf, body, path.string());
  char magic[8];
  r.Bytes(magic, sizeof(magic));
  const uint32_t version = r.Pod<uint32_t>();
  Require(version == kCheckpointFormatVersion, ErrorCode::kParse,
          "checkpoint '" + path.string() + "' has unsupported format version " +
              std::to_string(version));
  CheckpointFile file;
  file.schema = r.Str();
  try {
    file.metadata = nlohmann::json::parse(r.Str());
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParse, "checkpoint '" + path.string() + "' metadata: " + e.what());
  }
  const uint32_t count = r.Pod<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    TensorRecord t;
    t.name = r.Str();
    const uint32_t rank = r.Pod<uint32_t>();
    Require(rank <= 8, ErrorCode::kParse, "checkpoint tensor '" + t.name + "' has bad rank");
    for (uint32_t d = 0; d < rank; ++d) t.shape.push_back(r.Pod<int32_t>());
    t.data.resize(Numel(t.shape));
    r.Bytes(t.data.data(), t.data.size() * sizeof(float));
    file.tensors.push_back(std::move(t));
  }
  Require(r.pos() == body, ErrorCode::kParse, "checkpoint '" + path.string() + "' has trailing bytes");
  return file;
}

void ExportState(const StateRefs<float>& refs, const std::string& prefix, CheckpointFile& file) {
  for (const auto& p : refs.params) {
    auto v = p.var->value();
    file.tensors.push_back({prefix + p.name, p.var->shape(), {v.begin(), v.end()}});
  }
  ExportBuffers(refs.buffers, prefix, file);
}

void ExportBuffers(const std::vector<BufferRef<float>>& buffers, const std::string& prefix,
                   CheckpointFile& file) {
  for (const auto& b : buffers) {
    file.tensors.push_back({prefix + b.name, {static_cast<int>(b.data->size())}, *b.data});
  }
}

void ImportState(const CheckpointFile& file, const std::string& prefix, StateRefs<float>& refs) {
  for (auto& p : refs.params) {
    const TensorRecord* t = file.Find(prefix + p.name);
    Require(t != nullptr, ErrorCode::kParse, "checkpoint is missing tensor '" + prefix + p.name + "'");
    Require(t->shape == p.var->shape(), ErrorCode::kShapeMismatch,
            "checkpoint tensor '" + t->name + "' has shape " + ShapeStr(t->shape) + ", model expects " +
                ShapeStr(p.var->shape()));
    std::copy(t->data.begin(), t->data.end(), p.var->mutable_value().begin());
  }
  ImportBuffers(file, prefix, refs.buffers);
}

void ImportBuffers(const CheckpointFile& file, const std::string& prefix,
                   const std::vector<BufferRef<float>>& buffers) {
  for (const auto& b : buffers) {
    const TensorRecord* t = file.Find(prefix + b.name);
    Require(t != nullptr, ErrorCode::kParse, "checkpoint is missing buffer '" + prefix + b.name + "'");
    Require(t->data.size() == b.data->size() || b.data->empty(), ErrorCode::kShapeMismatch,
            "checkpoint buffer '" + t->name + "' has the wrong size");
    *b.data = t->data;
  }
}

}  // namespace hdrgan::nn
