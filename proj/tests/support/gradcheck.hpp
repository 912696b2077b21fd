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
#include <functional>
#include <random>
#include <vector>

#include "hdrgan/nn/tensor.hpp"

namespace hdrgan::testing {

struct GradCheckResult {
  double max_abs_error = 0.0;
  double max_grad = 0.0;
  // max |analytic - numeric| over max |numeric|
  double relative_error = 0.0;
};

// Central finite differences of a scalar function of one double tensor.
inline GradCheckResult CheckGradient(
    const std::function<nn::Var<double>(const nn::Var<double>&)>& f, const nn::Shape& shape,
    const std::vector<double>& x0, double h = 1e-6) {
  auto x = nn::Var<double>::Parameter(shape, x0);
  nn::Var<double> y = f(x);
  y.Backward();
  std::vector<double> analytic(x.grad().begin(), x.grad().end());
  if (analytic.empty()) analytic.assign(x0.size(), 0.0);
  GradCheckResult r;
  nn::NoGradGuard guard;
  std::vector<double> xp = x0;
  for (size_t i = 0; i < x0.size(); ++i) {
    xp[i] = x0[i] + h;
    const double fp = f(nn::Var<double>::Constant(shape, xp)).item();
    xp[i] = x0[i] - h;
    const double fm = f(nn::Var<double>::Constant(shape, xp)).item();
    xp[i] = x0[i];
    const double numeric = (fp - fm) / (2 * h);
    r.max_abs_error = std::max(r.max_abs_error, std::abs(numeric - analytic[i]));
    r.max_grad = std::max(r.max_grad, std::abs(numeric));
  }
  r.relative_error = r.max_abs_error / std::max(r.max_grad, 1e-12);
  return r;
}

inline std::vector<double> RandomVector(size_t n, uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& e : v) e = d(rng);
  return v;
}

// Flow [n, 2, h, w] whose sample points stay inside the frame and at least 0.2 px
// from any cell edge, where bilinear warping is smooth in the flow.
inline std::vector<double> InteriorFlow(int n, int h, int w, uint64_t seed, int reach = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step(-reach, reach);
  std::uniform_real_distribution<double> frac(0.2, 0.8);
  const size_t plane = static_cast<size_t>(h) * w;
  std::vector<double> flow(static_cast<size_t>(n) * 2 * plane);
  for (int b = 0; b < n; ++b)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int cx = std::clamp(x + step(rng), 0, w - 2), cy = std::clamp(y + step(rng), 0, h - 2);
        const size_t i = static_cast<size_t>(y) * w + x;
        flow[b * 2 * plane + i] = cx + frac(rng) - x;
        flow[b * 2 * plane + plane + i] = cy + frac(rng) - y;
      }
  return flow;
}

// Fixed random weighting so that vector-valued ops reduce to a scalar with a
// non-degenerate gradient.
inline nn::Var<double> WeightedSum(const nn::Var<double>& y, uint64_t seed = 99);

}  // namespace hdrgan::testing

#include "hdrgan/nn/ops.hpp"

namespace hdrgan::testing {

inline nn::Var<double> WeightedSum(const nn::Var<double>& y, uint64_t seed) {
  auto w = nn::Var<double>::Constant(y.shape(), RandomVector(y.numel(), seed));
  return nn::Sum(nn::Mul(y, w));
}

}  // namespace hdrgan::testing
