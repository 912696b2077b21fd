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

#include "hdrgan/nn/optim.hpp"

#include <cmath>

namespace hdrgan::nn {

Adam::Adam(std::vector<ParamRef<float>> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  Require(options_.learning_rate > 0.0, ErrorCode::kConfig, "Adam: learning rate must be positive");
  for (const auto& p : params_) {
    m_.emplace_back(p.var->numel(), 0.0f);
    v_.emplace_back(p.var->numel(), 0.0f);
  }
}

void Adam::Step() {
  ++step_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
  const float b1 = static_cast<float>(options_.beta1);
  const float b2 = static_cast<float>(options_.beta2);
  const float lr_t = static_cast<float>(options_.learning_rate * std::sqrt(bc2) / bc1);
  const float eps_t = static_cast<float>(options_.eps * std::sqrt(bc2));
  for (size_t k = 0; k < params_.size(); ++k) {
    Var<float>& p = *params_[k].var;
    auto g = p.grad();
    if (g.empty()) continue;
    auto w = p.mutable_value();
    auto& m = m_[k];
    auto& v = v_[k];
    for (size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0f - b1) * g[i];
      v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
      w[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps_t);
    }
  }
}

void Adam::ZeroGrad() {
  for (auto& p : params_) p.var->ZeroGrad();
}

std::vector<BufferRef<float>> Adam::StateBuffers() {
  std::vector<BufferRef<float>> out;
  for (size_t k = 0; k < params_.size(); ++k) {
    out.push_back({params_[k].name + ".adam_m", &m_[k]});
    out.push_back({params_[k].name + ".adam_v", &v_[k]});
  }
  return out;
}

}  // namespace hdrgan::nn
