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

#include <vector>

#include "hdrgan/nn/layers.hpp"

namespace hdrgan::nn {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam over a fixed parameter list. Moments are stored in registration order
// and exported as buffers for checkpointing.
class Adam {
 public:
  Adam(std::vector<ParamRef<float>> params, AdamOptions options);

  void Step();
  void ZeroGrad();

  long long step_count() const { return step_; }
  void set_step_count(long long s) { step_ = s; }
  const AdamOptions& options() const { return options_; }

  // first and second moments as named buffers ("<param>.adam_m", ".adam_v")
  std::vector<BufferRef<float>> StateBuffers();

 private:
  std::vector<ParamRef<float>> params_;
  AdamOptions options_;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
  long long step_ = 0;
};

}  // namespace hdrgan::nn
