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

// Plain double-precision loop implementations used as independent references.
// Tensors are flat NCHW vectors.

#include <algorithm>
#include <cmath>
#include <vector>

namespace hdrgan::testing {

struct Dims {
  int n, c, h, w;
  size_t size() const { return static_cast<size_t>(n) * c * h * w; }
  size_t at(int b, int k, int y, int x) const {
    return ((static_cast<size_t>(b) * c + k) * h + y) * w + x;
  }
};

inline double OracleMeanAbs(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / a.size();
}

inline double OracleMse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / a.size();
}

// Zero-padded "same" convolution followed by ReLU.
inline std::vector<double> OracleConvRelu(const std::vector<double>& x, Dims d,
                                          const std::vector<double>& weight,
                                          const std::vector<double>& bias, int cout, int k,
                                          Dims* out_dims) {
  const int r = k / 2;
  Dims od{d.n, cout, d.h, d.w};
  std::vector<double> y(od.size());
  for (int b = 0; b < d.n; ++b)
    for (int o = 0; o < cout; ++o)
      for (int yy = 0; yy < d.h; ++yy)
        for (int xx = 0; xx < d.w; ++xx) {
          double s = bias[o];
          for (int i = 0; i < d.c; ++i)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                const int sy = yy + ky - r, sx = xx + kx - r;
                if (sy < 0 || sy >= d.h || sx < 0 || sx >= d.w) continue;
                s += weight[((static_cast<size_t>(o) * d.c + i) * k + ky) * k + kx] *
                     x[d.at(b, i, sy, sx)];
              }
          y[od.at(b, o, yy, xx)] = std::max(s, 0.0);
        }
  *out_dims = od;
  return y;
}

inline std::vector<double> OracleMaxPool(const std::vector<double>& x, Dims d, Dims* out_dims) {
  Dims od{d.n, d.c, d.h / 2, d.w / 2};
  std::vector<double> y(od.size());
  for (int b = 0; b < d.n; ++b)
    for (int k = 0; k < d.c; ++k)
      for (int yy = 0; yy < od.h; ++yy)
        for (int xx = 0; xx < od.w; ++xx) {
          double m = x[d.at(b, k, 2 * yy, 2 * xx)];
          m = std::max(m, x[d.at(b, k, 2 * yy, 2 * xx + 1)]);
          m = std::max(m, x[d.at(b, k, 2 * yy + 1, 2 * xx)]);
          m = std::max(m, x[d.at(b, k, 2 * yy + 1, 2 * xx + 1)]);
          y[od.at(b, k, yy, xx)] = m;
        }
  *out_dims = od;
  return y;
}

// Per-sample gram, flattened [N, C, C], normalized by C*H*W.
inline std::vector<double> OracleGram(const std::vector<double>& f, Dims d) {
  std::vector<double> g(static_cast<size_t>(d.n) * d.c * d.c, 0.0);
  for (int b = 0; b < d.n; ++b)
    for (int i = 0; i < d.c; ++i)
      for (int j = 0; j < d.c; ++j) {
        double s = 0.0;
        for (int y = 0; y < d.h; ++y)
          for (int x = 0; x < d.w; ++x) s += f[d.at(b, i, y, x)] * f[d.at(b, j, y, x)];
        g[(static_cast<size_t>(b) * d.c + i) * d.c + j] = s / (static_cast<double>(d.c) * d.h * d.w);
      }
  return g;
}

// out(x, y) = f(x + dx, y + dy), bilinear with edge clamping. flow is [N, 2, H, W].
inline std::vector<double> OracleWarp(const std::vector<double>& f, Dims d,
                                      const std::vector<double>& flow) {
  std::vector<double> out(d.size());
  Dims fd{d.n, 2, d.h, d.w};
  for (int b = 0; b < d.n; ++b)
    for (int y = 0; y < d.h; ++y)
      for (int x = 0; x < d.w; ++x) {
        const double sx = std::clamp(x + flow[fd.at(b, 0, y, x)], 0.0, d.w - 1.0);
        const double sy = std::clamp(y + flow[fd.at(b, 1, y, x)], 0.0, d.h - 1.0);
        const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
        const int x1 = std::min(x0 + 1, d.w - 1), y1 = std::min(y0 + 1, d.h - 1);
        const double ax = sx - x0, ay = sy - y0;
        for (int k = 0; k < d.c; ++k) {
          out[d.at(b, k, y, x)] =
              (1 - ay) * ((1 - ax) * f[d.at(b, k, y0, x0)] + ax * f[d.at(b, k, y0, x1)]) +
              ay * ((1 - ax) * f[d.at(b, k, y1, x0)] + ax * f[d.at(b, k, y1, x1)]);
        }
      }
  return out;
}

}  // namespace hdrgan::testing
