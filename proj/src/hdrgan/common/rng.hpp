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

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace hdrgan {

// FNV-1a 64-bit; used for config hashes, parameter digests and seed mixing.
inline uint64_t Fnv1a(std::span<const unsigned char> bytes,
                      uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t Fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  return Fnv1a(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()), h);
}

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a list of keys.
inline uint64_t DeriveSeed(uint64_t seed, std::initializer_list<uint64_t> keys) {
  uint64_t h = SplitMix64(seed);
  for (uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k));
  return h;
}

inline uint64_t DeriveSeed(uint64_t seed, std::string_view tag,
                           std::initializer_list<uint64_t> keys = {}) {
  uint64_t h = SplitMix64(seed ^ Fnv1a(tag));
  for (uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k));
  return h;
}

using Rng = std::mt19937_64;

inline std::string HexDigest(uint64_t v) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = kHex[v & 0xf];
  return s;
}

}  // namespace hdrgan
