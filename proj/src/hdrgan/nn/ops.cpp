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

#include "hdrgan/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hdrgan/common/bilinear.hpp"
#include "hdrgan/nn/gemm.hpp"

namespace hdrgan::nn {
namespace {

template <typename T>
void RequireSame(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    Fail(ErrorCode::kShapeMismatch,
         std::string(op) + ": shape " + ShapeStr(a.shape()) + " vs " + ShapeStr(b.shape()));
  }
}

template <typename T>
void RequireRank(const Var<T>& a, int rank, const char* op) {
  if (a.rank() != rank) {
    Fail(ErrorCode::kShapeMismatch, std::string(op) + ": expected rank " + std::to_string(rank) +
                                        ", got " + ShapeStr(a.shape()));
  }
}

// Accumulation target for a parent, or nullptr when it needs no gradient.
template <typename T>
T* GradOf(Node<T>* n) {
  if (n == nullptr || !n->requires_grad) return nullptr;
  return n->EnsureGrad().data();
}

template <typename T, typename Fwd, typename Bwd>
Var<T> Unary(const Var<T>& a, Fwd fwd, Bwd dfdx) {
  std::vector<T> out(a.numel());
  auto av = a.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i]);
  Node<T>* pa = a.node();
  return MakeResult<T>(a.shape(), std::move(out), {a}, [pa, dfdx](Node<T>& self) {
    T* ga = GradOf(pa);
    if (!ga) return;
    for (size_t i = 0; i < self.grad.size(); ++i) {
      ga[i] += self.grad[i] * dfdx(pa->value[i], self.value[i]);
    }
  });
}

template <typename T>
Var<T> ScalarResult(T v, std::vector<Var<T>> parents, std::function<void(Node<T>&)> bw) {
  return MakeResult<T>(Shape{}, std::vector<T>{v}, std::move(parents), std::move(bw));
}

// img [C, H, W] -> col [C*kh*kw, Ho*Wo], zero padding.
template <typename T>
void Im2Col(const T* img, int channels, int height, int width, int k, int stride, int pad, int ho,
            int wo, T* col) {
  const size_t plane = static_cast<size_t>(ho) * wo;
  for (int c = 0; c < channels; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        T* dst = col + ((static_cast<size_t>(c) * k + ki) * k + kj) * plane;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ki;
          T* drow = dst + static_cast<size_t>(oy) * wo;
          if (iy < 0 || iy >= height) {
            std::fill(drow, drow + wo, T(0));
            continue;
          }
          const T* srow = img + (static_cast<size_t>(c) * height + iy) * width;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kj;
            drow[ox] = (ix >= 0 && ix < width) ? srow[ix] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: accumulates col into img.
template <typename T>
void Col2Im(const T* col, int channels, int height, int width, int k, int stride, int pad, int ho,
            int wo, T* img) {
  const size_t plane = static_cast<size_t>(ho) * wo;
  for (int c = 0; c < channels; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const T* src = col + ((static_cast<size_t>(c) * k + ki) * k + kj) * plane;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ki;
          if (iy < 0 || iy >= height) continue;
          T* irow = img + (static_cast<size_t>(c) * height + iy) * width;
          const T* srow = src + static_cast<size_t>(oy) * wo;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kj;
            if (ix >= 0 && ix < width) irow[ix] += srow[ox];
          }
        }
      }
    }
  }
}

template <typename T>
int ReflectIndex(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

// ---------------------------------------------------------------- elementwise

template <typename T>
Var<T> Add(const Var<T>& a, const Var<T>& b) {
  RequireSame(a, b, "Add");
  std::vector<T> out(a.numel());
  auto av = a.value();
  auto bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  Node<T>* pa = a.node();
  Node<T>* pb = b.node();
  return MakeResult<T>(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    if (T* ga = GradOf(pa)) {
      for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    }
    if (T* gb = GradOf(pb)) {
      for (size_t i = 0; i < self.grad.size(); ++i) gb[i] += self.grad[i];
    }
  });
}

template <typename T>
Var<T> Sub(const Var<T>& a, const Var<T>& b) {
  RequireSame(a, b, "Sub");
  std::vector<T> out(a.numel());
  auto av = a.value();
  auto bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  Node<T>* pa = a.node();
  Node<T>* pb = b.node();
  return MakeResult<T>(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    if (T* ga = GradOf(pa)) {
      for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    }
    if (T* gb = GradOf(pb)) {
      for (size_t i = 0; i < self.grad.size(); ++i) gb[i] -= self.grad[i];
    }
  });
}

template <typename T>
Var<T> Mul(const Var<T>& a, const Var<T>& b) {
  RequireSame(a, b, "Mul");
  std::vector<T> out(a.numel());
  auto av = a.value();
  auto bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  Node<T>* pa = a.node();
  Node<T>* pb = b.node();
  return MakeResult<T>(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    if (T* ga = GradOf(pa)) {
      for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] * pb->value[i];
    }
    if (T* gb = GradOf(pb)) {
      for (size_t i = 0; i < self.grad.size(); ++i) gb[i] += self.grad[i] * pa->value[i];
    }
  });
}

template <typename T>
Var<T> Scale(const Var<T>& a, T s) {
  return Unary<T>(a, [s](T x) { return x * s; }, [s](T, T) { return s; });
}

template <typename T>
Var<T> AddScalar(const Var<T>& a, T s) {
  return Unary<T>(a, [s](T x) { return x + s; }, [](T, T) { return T(1); });
}

template <typename T>
Var<T> Relu(const Var<T>& a) {
  return Unary<T>(
      a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> LeakyRelu(const Var<T>& a, T slope) {
  return Unary<T>(
      a, [slope](T x) { return x > T(0) ? x : slope * x; },
      [slope](T x, T) { return x > T(0) ? T(1) : slope; });
}

template <typename T>
Var<T> Sigmoid(const Var<T>& a) {
  return Unary<T>(
      a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> Clamp(const Var<T>& a, T lo, T hi) {
  return Unary<T>(
      a, [lo, hi](T x) { return std::clamp(x, lo, hi); },
      [lo, hi](T x, T) { return (x > lo && x < hi) ? T(1) : T(0); });
}

// ----------------------------------------------------------------- reductions

template <typename T>
Var<T> Sum(const Var<T>& a) {
  T s = T(0);
  for (T v : a.value()) s += v;
  Node<T>* pa = a.node();
  return ScalarResult<T>(s, {a}, [pa](Node<T>& self) {
    if (T* ga = GradOf(pa)) {
      for (size_t i = 0; i < pa->value.size(); ++i) ga[i] += self.grad[0];
    }
  });
}

template <typename T>
Var<T> Mean(const Var<T>& a) {
  const T inv = T(1) / static_cast<T>(a.numel());
  return Scale(Sum(a), inv);
}

template <typename T>
Var<T> MeanAbsDiff(const Var<T>& a, const Var<T>& b) {
  RequireSame(a, b, "MeanAbsDiff");
  auto av = a.value();
  auto bv = b.value();
  T s = T(0);
  for (size_t i = 0; i < av.size(); ++i) s += std::abs(av[i] - bv[i]);
  const T inv = T(1) / static_cast<T>(av.size());
  Node<T>* pa = a.node();
  Node<T>* pb = b.node();
  return ScalarResult<T>(s * inv, {a, b}, [pa, pb, inv](Node<T>& self) {
    const T g = self.grad[0] * inv;
    T* ga = GradOf(pa);
    T* gb = GradOf(pb);
    for (size_t i = 0; i < pa->value.size(); ++i) {
      const T d = pa->value[i] - pb->value[i];
      const T sgn = d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0));
      if (ga) ga[i] += g * sgn;
      if (gb) gb[i] -= g * sgn;
    }
  });
}

template <typename T>
Var<T> MeanSquaredDiff(const Var<T>& a, const Var<T>& b) {
  RequireSame(a, b, "MeanSquaredDiff");
  auto av = a.value();
  auto bv = b.value();
  T s = T(0);
  for (size_t i = 0; i < av.size(); ++i) {
    const T d = av[i] - bv[i];
    s += d * d;
  }
  const T inv = T(1) / static_cast<T>(av.size());
  Node<T>* pa = a.node();
  Node<T>* pb = b.node();
  return ScalarResult<T>(s * inv, {a, b}, [pa, pb, inv](Node<T>& self) {
    const T g = T(2) * self.grad[0] * inv;
    T* ga = GradOf(pa);
    T* gb = GradOf(pb);
    for (size_t i = 0; i < pa->value.size(); ++i) {
      const T d = pa->value[i] - pb->value[i];
      if (ga) ga[i] += g * d;
      if (gb) gb[i] -= g * d;
    }
  });
}

template <typename T>
Var<T> SqrtScalar(const Var<T>& a) {
  Require(a.numel() == 1, ErrorCode::kShapeMismatch, "SqrtScalar expects a scalar");
  const T x = std::max(a.item(), T(0));
  const T y = std::sqrt(x);
  Node<T>* pa = a.node();
  return ScalarResult<T>(y, {a}, [pa, y](Node<T>& self) {
    if (T* ga = GradOf(pa)) {
      if (y > T(0)) ga[0] += self.grad[0] / (T(2) * y);
    }
  });
}

template <typename T>
Var<T> MeanLogClamped(const Var<T>& p, T eps) {
  auto pv = p.value();
  T s = T(0);
  for (T v : pv) s += std::log(std::clamp(v, eps, T(1)));
  const T inv = T(1) / static_cast<T>(pv.size());
  Node<T>* pp = p.node();
  return ScalarResult<T>(s * inv, {p}, [pp, eps, inv](Node<T>& self) {
    if (T* gp = GradOf(pp)) {
      for (size_t i = 0; i < pp->value.size(); ++i) {
        const T v = pp->value[i];
        if (v > eps && v < T(1)) gp[i] += self.grad[0] * inv / v;
      }
    }
  });
}

template <typename T>
Var<T> MeanLogOneMinusClamped(const Var<T>& p, T eps) {
  auto pv = p.value();
  T s = T(0);
  for (T v : pv) s += std::log(std::clamp(T(1) - v, eps, T(1)));
  const T inv = T(1) / static_cast<T>(pv.size());
  Node<T>* pp = p.node();
  return ScalarResult<T>(s * inv, {p}, [pp, eps, inv](Node<T>& self) {
    if (T* gp = GradOf(pp)) {
      for (size_t i = 0; i < pp->value.size(); ++i) {
        const T q = T(1) - pp->value[i];
        if (q > eps && q < T(1)) gp[i] -= self.grad[0] * inv / q;
      }
    }
  });
}

// --------------------------------------------------------------------- layout

template <typename T>
Var<T> Reshape(const Var<T>& a, Shape shape) {
  Require(Numel(shape) == a.numel(), ErrorCode::kShapeMismatch,
          "Reshape: " + ShapeStr(a.shape()) + " -> " + ShapeStr(shape));
  Node<T>* pa = a.node();
  return MakeResult<T>(std::move(shape), std::vector<T>(a.value().begin(), a.value().end()), {a},
                       [pa](Node<T>& self) {
                         if (T* ga = GradOf(pa)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
                         }
                       });
}

template <typename T>
Var<T> ConcatChannels(const std::vector<Var<T>>& parts) {
  Require(!parts.empty(), ErrorCode::kInvalidArgument, "ConcatChannels: no inputs");
  for (const auto& p : parts) RequireRank(p, 4, "ConcatChannels");
  const int n = parts[0].dim(0), h = parts[0].dim(2), w = parts[0].dim(3);
  int c_total = 0;
  for (const auto& p : parts) {
    if (p.dim(0) != n || p.dim(2) != h || p.dim(3) != w) {
      Fail(ErrorCode::kShapeMismatch, "ConcatChannels: " + ShapeStr(parts[0].shape()) + " vs " +
                                          ShapeStr(p.shape()));
    }
    c_total += p.dim(1);
  }
  const size_t plane = static_cast<size_t>(h) * w;
  std::vector<T> out(static_cast<size_t>(n) * c_total * plane);
  std::vector<Node<T>*> nodes;
  std::vector<int> offsets;
  int off = 0;
  for (const auto& p : parts) {
    const int c = p.dim(1);
    auto pv = p.value();
    for (int b = 0; b < n; ++b) {
      std::copy_n(pv.begin() + static_cast<size_t>(b) * c * plane, c * plane,
                  out.begin() + (static_cast<size_t>(b) * c_total + off) * plane);
    }
    nodes.push_back(p.node());
    offsets.push_back(off);
    off += c;
  }
  return MakeResult<T>(Shape{n, c_total, h, w}, std::move(out), parts,
                       [nodes, offsets, n, c_total, plane](Node<T>& self) {
                         for (size_t k = 0; k < nodes.size(); ++k) {
                           T* g = GradOf(nodes[k]);
                           if (!g) continue;
                           const int c = nodes[k]->shape[1];
                           for (int b = 0; b < n; ++b) {
                             const T* src = self.grad.data() +
                                            (static_cast<size_t>(b) * c_total + offsets[k]) * plane;
                             T* dst = g + static_cast<size_t>(b) * c * plane;
                             for (size_t i = 0; i < c * plane; ++i) dst[i] += src[i];
                           }
                         }
                       });
}

template <typename T>
Var<T> ConcatBatch(const std::vector<Var<T>>& parts) {
  Require(!parts.empty(), ErrorCode::kInvalidArgument, "ConcatBatch: no inputs");
  Shape shape = parts[0].shape();
  Require(!shape.empty(), ErrorCode::kShapeMismatch, "ConcatBatch: scalar input");
  int n_total = 0;
  std::vector<T> out;
  std::vector<Node<T>*> nodes;
  for (const auto& p : parts) {
    Shape tail_a(shape.begin() + 1, shape.end());
    Shape tail_b(p.shape().begin() + 1, p.shape().end());
    Require(tail_a == tail_b, ErrorCode::kShapeMismatch,
            "ConcatBatch: " + ShapeStr(shape) + " vs " + ShapeStr(p.shape()));
    n_total += p.dim(0);
    out.insert(out.end(), p.value().begin(), p.value().end());
    nodes.push_back(p.node());
  }
  shape[0] = n_total;
  return MakeResult<T>(std::move(shape), std::move(out), parts, [nodes](Node<T>& self) {
    size_t off = 0;
    for (Node<T>* nd : nodes) {
      if (T* g = GradOf(nd)) {
        for (size_t i = 0; i < nd->value.size(); ++i) g[i] += self.grad[off + i];
      }
      off += nd->value.size();
    }
  });
}

template <typename T>
Var<T> SliceBatch(const Var<T>& a, int start, int count) {
  Require(a.rank() >= 1 && start >= 0 && count > 0 && start + count <= a.dim(0),
          ErrorCode::kInvalidArgument, "SliceBatch: range out of bounds");
  Shape shape = a.shape();
  const size_t per = a.numel() / static_cast<size_t>(shape[0]);
  shape[0] = count;
  const size_t off = static_cast<size_t>(start) * per;
  std::vector<T> out(a.value().begin() + off, a.value().begin() + off + count * per);
  Node<T>* pa = a.node();
  return MakeResult<T>(std::move(shape), std::move(out), {a}, [pa, off](Node<T>& self) {
    if (T* g = GradOf(pa)) {
      for (size_t i = 0; i < self.grad.size(); ++i) g[off + i] += self.grad[i];
    }
  });
}

template <typename T>
Var<T> ReflectPad(const Var<T>& a, int top, int bottom, int left, int right) {
  RequireRank(a, 4, "ReflectPad");
  const int n = a.dim(0), c = a.dim(1), h = a.dim(2), w = a.dim(3);
  Require(top >= 0 && bottom >= 0 && left >= 0 && right >= 0, ErrorCode::kInvalidArgument,
          "ReflectPad: negative padding");
  if (top == 0 && bottom == 0 && left == 0 && right == 0) return a;
  const int ho = h + top + bottom, wo = w + left + right;
  std::vector<size_t> src_index(static_cast<size_t>(ho) * wo);
  for (int y = 0; y < ho; ++y) {
    for (int x = 0; x < wo; ++x) {
      src_index[static_cast<size_t>(y) * wo + x] =
          static_cast<size_t>(ReflectIndex<T>(y - top, h)) * w + ReflectIndex<T>(x - left, w);
    }
  }
  std::vector<T> out(static_cast<size_t>(n) * c * ho * wo);
  auto av = a.value();
  const size_t in_plane = static_cast<size_t>(h) * w, out_plane = src_index.size();
  for (size_t p = 0; p < static_cast<size_t>(n) * c; ++p) {
    for (size_t i = 0; i < out_plane; ++i) out[p * out_plane + i] = av[p * in_plane + src_index[i]];
  }
  Node<T>* pa = a.node();
  return MakeResult<T>(Shape{n, c, ho, wo}, std::move(out), {a},
                       [pa, src_index = std::move(src_index), in_plane, out_plane](Node<T>& self) {
                         T* g = GradOf(pa);
                         if (!g) return;
                         const size_t planes = self.grad.size() / out_plane;
                         for (size_t p = 0; p < planes; ++p) {
                           for (size_t i = 0; i < out_plane; ++i) {
                             g[p * in_plane + src_index[i]] += self.grad[p * out_plane + i];
                           }
                         }
                       });
}

template <typename T>
Var<T> Crop(const Var<T>& a, int top, int left, int height, int width) {
  RequireRank(a, 4, "Crop");
  const int n = a.dim(0), c = a.dim(1), h = a.dim(2), w = a.dim(3);
  Require(top >= 0 && left >= 0 && height > 0 && width > 0 && top + height <= h &&
              left + width <= w,
          ErrorCode::kInvalidArgument, "Crop: window out of bounds");
  if (top == 0 && left == 0 && height == h && width == w) return a;
  std::vector<T> out(static_cast<size_t>(n) * c * height * width);
  auto av = a.value();
  for (size_t p = 0; p < static_cast<size_t>(n) * c; ++p) {
    for (int y = 0; y < height; ++y) {
      const T* src = av.data() + (p * h + top + y) * w + left;
      std::copy_n(src, width, out.begin() + (p * height + y) * width);
    }
  }
  Node<T>* pa = a.node();
  return MakeResult<T>(Shape{n, c, height, width}, std::move(out), {a},
                       [pa, n, c, h, w, top, left, height, width](Node<T>& self) {
                         T* g = GradOf(pa);
                         if (!g) return;
                         for (size_t p = 0; p < static_cast<size_t>(n) * c; ++p) {
                           for (int y = 0; y < height; ++y) {
                             T* dst = g + (p * h + top + y) * w + left;
                             const T* src = self.grad.data() + (p * height + y) * width;
                             for (int x = 0; x < width; ++x) dst[x] += src[x];
                           }
                         }
                       });
}

// --------------------------------------------------------------------- layers

template <typename T>
Var<T> Conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride, int pad) {
  RequireRank(x, 4, "Conv2d");
  RequireRank(weight, 4, "Conv2d weight");
  const int n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int cout = weight.dim(0), k = weight.dim(2);
  Require(weight.dim(1) == cin && weight.dim(3) == k, ErrorCode::kShapeMismatch,
          "Conv2d: input " + ShapeStr(x.shape()) + " vs weight " + ShapeStr(weight.shape()));
  Require(!bias.defined() || bias.numel() == static_cast<size_t>(cout), ErrorCode::kShapeMismatch,
          "Conv2d: bias size");
  Require(stride >= 1 && pad >= 0, ErrorCode::kInvalidArgument, "Conv2d: bad stride/pad");
  const int ho = (h + 2 * pad - k) / stride + 1;
  const int wo = (w + 2 * pad - k) / stride + 1;
  Require(h + 2 * pad >= k && w + 2 * pad >= k && ho > 0 && wo > 0, ErrorCode::kShapeMismatch,
          "Conv2d: input " + ShapeStr(x.shape()) + " too small for kernel " + std::to_string(k));
  const int kk = cin * k * k;
  const int p = ho * wo;
  const bool pointwise = (k == 1 && stride == 1 && pad == 0);
  std::vector<T> out(static_cast<size_t>(n) * cout * p);
  std::vector<T> col(pointwise ? 0 : static_cast<size_t>(kk) * p);
  auto xv = x.value();
  auto wv = weight.value();
  for (int b = 0; b < n; ++b) {
    const T* xb = xv.data() + static_cast<size_t>(b) * cin * h * w;
    const T* cb = xb;
    if (!pointwise) {
      Im2Col(xb, cin, h, w, k, stride, pad, ho, wo, col.data());
      cb = col.data();
    }
    T* ob = out.data() + static_cast<size_t>(b) * cout * p;
    Gemm(false, false, cout, p, kk, T(1), wv.data(), cb, T(0), ob);
    if (bias.defined()) {
      auto bv = bias.value();
      for (int c = 0; c < cout; ++c) {
        T* row = ob + static_cast<size_t>(c) * p;
        for (int i = 0; i < p; ++i) row[i] += bv[c];
      }
    }
  }
  Node<T>* px = x.node();
  Node<T>* pw = weight.node();
  Node<T>* pb = bias.node();
  return MakeResult<T>(
      Shape{n, cout, ho, wo}, std::move(out), {x, weight, bias},
      [=](Node<T>& self) {
        T* gx = GradOf(px);
        T* gw = GradOf(pw);
        T* gb = GradOf(pb);
        std::vector<T> col_buf(pointwise ? 0 : static_cast<size_t>(kk) * p);
        std::vector<T> dcol(pointwise ? 0 : static_cast<size_t>(kk) * p);
        for (int b = 0; b < n; ++b) {
          const T* go = self.grad.data() + static_cast<size_t>(b) * cout * p;
          const T* xb = px->value.data() + static_cast<size_t>(b) * cin * h * w;
          if (gw) {
            const T* cb = xb;
            if (!pointwise) {
              Im2Col(xb, cin, h, w, k, stride, pad, ho, wo, col_buf.data());
              cb = col_buf.data();
            }
            Gemm(false, true, cout, kk, p, T(1), go, cb, T(1), gw);
          }
          if (gx) {
            T* gxb = gx + static_cast<size_t>(b) * cin * h * w;
            if (pointwise) {
              Gemm(true, false, kk, p, cout, T(1), pw->value.data(), go, T(1), gxb);
            } else {
              Gemm(true, false, kk, p, cout, T(1), pw->value.data(), go, T(0), dcol.data());
              Col2Im(dcol.data(), cin, h, w, k, stride, pad, ho, wo, gxb);
            }
          }
          if (gb) {
            for (int c = 0; c < cout; ++c) {
              const T* row = go + static_cast<size_t>(c) * p;
              T s = T(0);
              for (int i = 0; i < p; ++i) s += row[i];
              gb[c] += s;
            }
          }
        }
      });
}

template <typename T>
Var<T> ConvTranspose2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride,
                       int pad) {
  RequireRank(x, 4, "ConvTranspose2d");
  RequireRank(weight, 4, "ConvTranspose2d weight");
  const int n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int cout = weight.dim(1), k = weight.dim(2);
  Require(weight.dim(0) == cin && weight.dim(3) == k, ErrorCode::kShapeMismatch,
          "ConvTranspose2d: input " + ShapeStr(x.shape()) + " vs weight " +
              ShapeStr(weight.shape()));
  Require(!bias.defined() || bias.numel() == static_cast<size_t>(cout), ErrorCode::kShapeMismatch,
          "ConvTranspose2d: bias size");
  const int ho = (h - 1) * stride - 2 * pad + k;
  const int wo = (w - 1) * stride - 2 * pad + k;
  Require(ho > 0 && wo > 0, ErrorCode::kShapeMismatch, "ConvTranspose2d: empty output");
  const int kk = cout * k * k;
  const int hw = h * w;
  const size_t out_plane = static_cast<size_t>(ho) * wo;
  std::vector<T> out(static_cast<size_t>(n) * cout * out_plane, T(0));
  std::vector<T> col(static_cast<size_t>(kk) * hw);
  auto xv = x.value();
  auto wv = weight.value();
  for (int b = 0; b < n; ++b) {
    const T* xb = xv.data() + static_cast<size_t>(b) * cin * hw;
    Gemm(true, false, kk, hw, cin, T(1), wv.data(), xb, T(0), col.data());
    T* ob = out.data() + static_cast<size_t>(b) * cout * out_plane;
    Col2Im(col.data(), cout, ho, wo, k, stride, pad, h, w, ob);
    if (bias.defined()) {
      auto bv = bias.value();
      for (int c = 0; c < cout; ++c) {
        T* row = ob + c * out_plane;
        for (size_t i = 0; i < out_plane; ++i) row[i] += bv[c];
      }
    }
  }
  Node<T>* px = x.node();
  Node<T>* pw = weight.node();
  Node<T>* pb = bias.node();
  return MakeResult<T>(
      Shape{n, cout, ho, wo}, std::move(out), {x, weight, bias},
      [=](Node<T>& self) {
        T* gx = GradOf(px);
        T* gw = GradOf(pw);
        T* gb = GradOf(pb);
        std::vector<T> dcol(static_cast<size_t>(kk) * hw);
        for (int b = 0; b < n; ++b) {
          const T* go = self.grad.data() + static_cast<size_t>(b) * cout * out_plane;
          if (gx || gw) Im2Col(go, cout, ho, wo, k, stride, pad, h, w, dcol.data());
          if (gx) {
            Gemm(false, false, cin, hw, kk, T(1), pw->value.data(), dcol.data(), T(1),
                 gx + static_cast<size_t>(b) * cin * hw);
          }
          if (gw) {
            Gemm(false, true, cin, kk, hw, T(1), px->value.data() + static_cast<size_t>(b) * cin * hw,
                 dcol.data(), T(1), gw);
          }
          if (gb) {
            for (int c = 0; c < cout; ++c) {
              const T* row = go + c * out_plane;
              T s = T(0);
              for (size_t i = 0; i < out_plane; ++i) s += row[i];
              gb[c] += s;
            }
          }
        }
      });
}

template <typename T>
Var<T> BatchNorm2d(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                   std::vector<T>& running_mean, std::vector<T>& running_var, bool training,
                   T momentum, T eps) {
  RequireRank(x, 4, "BatchNorm2d");
  const int n = x.dim(0), c = x.dim(1);
  const size_t plane = static_cast<size_t>(x.dim(2)) * x.dim(3);
  Require(gamma.numel() == static_cast<size_t>(c) && beta.numel() == static_cast<size_t>(c) &&
              running_mean.size() == static_cast<size_t>(c) &&
              running_var.size() == static_cast<size_t>(c),
          ErrorCode::kShapeMismatch, "BatchNorm2d: parameter size");
  const size_t count = static_cast<size_t>(n) * plane;
  auto xv = x.value();
  std::vector<T> mean(c), inv_std(c);
  for (int ch = 0; ch < c; ++ch) {
    if (training) {
      T s = T(0);
      for (int b = 0; b < n; ++b) {
        const T* src = xv.data() + (static_cast<size_t>(b) * c + ch) * plane;
        for (size_t i = 0; i < plane; ++i) s += src[i];
      }
      const T m = s / static_cast<T>(count);
      T ss = T(0);
      for (int b = 0; b < n; ++b) {
        const T* src = xv.data() + (static_cast<size_t>(b) * c + ch) * plane;
        for (size_t i = 0; i < plane; ++i) ss += (src[i] - m) * (src[i] - m);
      }
      const T var = ss / static_cast<T>(count);
      mean[ch] = m;
      inv_std[ch] = T(1) / std::sqrt(var + eps);
      const T unbiased = count > 1 ? ss / static_cast<T>(count - 1) : var;
      running_mean[ch] = (T(1) - momentum) * running_mean[ch] + momentum * m;
      running_var[ch] = (T(1) - momentum) * running_var[ch] + momentum * unbiased;
    } else {
      mean[ch] = running_mean[ch];
      inv_std[ch] = T(1) / std::sqrt(running_var[ch] + eps);
    }
  }
  std::vector<T> xhat(xv.size()), out(xv.size());
  auto gv = gamma.value();
  auto bv = beta.value();
  for (int b = 0; b < n; ++b) {
    for (int ch = 0; ch < c; ++ch) {
      const size_t off = (static_cast<size_t>(b) * c + ch) * plane;
      for (size_t i = 0; i < plane; ++i) {
        xhat[off + i] = (xv[off + i] - mean[ch]) * inv_std[ch];
        out[off + i] = gv[ch] * xhat[off + i] + bv[ch];
      }
    }
  }
  Node<T>* px = x.node();
  Node<T>* pg = gamma.node();
  Node<T>* pbt = beta.node();
  return MakeResult<T>(
      x.shape(), std::move(out), {x, gamma, beta},
      [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<T>& self) {
        T* gx = GradOf(px);
        T* gg = GradOf(pg);
        T* gb = GradOf(pbt);
        for (int ch = 0; ch < c; ++ch) {
          T sum_dy = T(0), sum_dy_xhat = T(0);
          for (int b = 0; b < n; ++b) {
            const size_t off = (static_cast<size_t>(b) * c + ch) * plane;
            for (size_t i = 0; i < plane; ++i) {
              sum_dy += self.grad[off + i];
              sum_dy_xhat += self.grad[off + i] * xhat[off + i];
            }
          }
          if (gg) gg[ch] += sum_dy_xhat;
          if (gb) gb[ch] += sum_dy;
          if (!gx) continue;
          const T g = pg->value[ch];
          const T scale = g * inv_std[ch];
          const T mdy = sum_dy / static_cast<T>(count);
          const T mdyx = sum_dy_xhat / static_cast<T>(count);
          for (int b = 0; b < n; ++b) {
            const size_t off = (static_cast<size_t>(b) * c + ch) * plane;
            for (size_t i = 0; i < plane; ++i) {
              gx[off + i] += training
                                 ? scale * (self.grad[off + i] - mdy - xhat[off + i] * mdyx)
                                 : scale * self.grad[off + i];
            }
          }
        }
      });
}

template <typename T>
Var<T> InstanceNorm2d(const Var<T>& x, T eps) {
  RequireRank(x, 4, "InstanceNorm2d");
  const size_t planes = static_cast<size_t>(x.dim(0)) * x.dim(1);
  const size_t plane = static_cast<size_t>(x.dim(2)) * x.dim(3);
  auto xv = x.value();
  std::vector<T> out(xv.size()), inv_std(planes);
  for (size_t p = 0; p < planes; ++p) {
    const T* src = xv.data() + p * plane;
    T s = T(0);
    for (size_t i = 0; i < plane; ++i) s += src[i];
    const T m = s / static_cast<T>(plane);
    T ss = T(0);
    for (size_t i = 0; i < plane; ++i) ss += (src[i] - m) * (src[i] - m);
    inv_std[p] = T(1) / std::sqrt(ss / static_cast<T>(plane) + eps);
    for (size_t i = 0; i < plane; ++i) out[p * plane + i] = (src[i] - m) * inv_std[p];
  }
  Node<T>* px = x.node();
  return MakeResult<T>(x.shape(), std::move(out), {x},
                       [px, planes, plane, inv_std = std::move(inv_std)](Node<T>& self) {
                         T* gx = GradOf(px);
                         if (!gx) return;
                         for (size_t p = 0; p < planes; ++p) {
                           const T* dy = self.grad.data() + p * plane;
                           const T* xh = self.value.data() + p * plane;
                           T sdy = T(0), sdyx = T(0);
                           for (size_t i = 0; i < plane; ++i) {
                             sdy += dy[i];
                             sdyx += dy[i] * xh[i];
                           }
                           const T mdy = sdy / static_cast<T>(plane);
                           const T mdyx = sdyx / static_cast<T>(plane);
                           for (size_t i = 0; i < plane; ++i) {
                             gx[p * plane + i] += inv_std[p] * (dy[i] - mdy - xh[i] * mdyx);
                           }
                         }
                       });
}

template <typename T>
Var<T> MaxPool2x2(const Var<T>& x) {
  RequireRank(x, 4, "MaxPool2x2");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int ho = h / 2, wo = w / 2;
  Require(ho > 0 && wo > 0, ErrorCode::kShapeMismatch, "MaxPool2x2: input too small");
  const size_t planes = static_cast<size_t>(n) * c;
  std::vector<T> out(planes * ho * wo);
  std::vector<size_t> arg(out.size());
  auto xv = x.value();
  for (size_t p = 0; p < planes; ++p) {
    for (int y = 0; y < ho; ++y) {
      for (int xx = 0; xx < wo; ++xx) {
        size_t best = p * h * w + static_cast<size_t>(2 * y) * w + 2 * xx;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const size_t idx = p * h * w + static_cast<size_t>(2 * y + dy) * w + 2 * xx + dx;
            if (xv[idx] > xv[best]) best = idx;
          }
        }
        const size_t o = (p * ho + y) * wo + xx;
        out[o] = xv[best];
        arg[o] = best;
      }
    }
  }
  Node<T>* px = x.node();
  return MakeResult<T>(Shape{n, c, ho, wo}, std::move(out), {x},
                       [px, arg = std::move(arg)](Node<T>& self) {
                         if (T* gx = GradOf(px)) {
                           for (size_t i = 0; i < arg.size(); ++i) gx[arg[i]] += self.grad[i];
                         }
                       });
}

template <typename T>
Var<T> GlobalAvgPool(const Var<T>& x) {
  RequireRank(x, 4, "GlobalAvgPool");
  const int n = x.dim(0), c = x.dim(1);
  const size_t plane = static_cast<size_t>(x.dim(2)) * x.dim(3);
  auto xv = x.value();
  std::vector<T> out(static_cast<size_t>(n) * c);
  for (size_t p = 0; p < out.size(); ++p) {
    T s = T(0);
    for (size_t i = 0; i < plane; ++i) s += xv[p * plane + i];
    out[p] = s / static_cast<T>(plane);
  }
  Node<T>* px = x.node();
  return MakeResult<T>(Shape{n, c}, std::move(out), {x}, [px, plane](Node<T>& self) {
    T* gx = GradOf(px);
    if (!gx) return;
    const T inv = T(1) / static_cast<T>(plane);
    for (size_t p = 0; p < self.grad.size(); ++p) {
      for (size_t i = 0; i < plane; ++i) gx[p * plane + i] += self.grad[p] * inv;
    }
  });
}

template <typename T>
Var<T> Linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias) {
  RequireRank(x, 2, "Linear");
  RequireRank(weight, 2, "Linear weight");
  const int n = x.dim(0), in = x.dim(1), out_f = weight.dim(0);
  Require(weight.dim(1) == in, ErrorCode::kShapeMismatch,
          "Linear: input " + ShapeStr(x.shape()) + " vs weight " + ShapeStr(weight.shape()));
  std::vector<T> out(static_cast<size_t>(n) * out_f);
  Gemm(false, true, n, out_f, in, T(1), x.value().data(), weight.value().data(), T(0), out.data());
  if (bias.defined()) {
    auto bv = bias.value();
    for (int b = 0; b < n; ++b) {
      for (int o = 0; o < out_f; ++o) out[static_cast<size_t>(b) * out_f + o] += bv[o];
    }
  }
  Node<T>* px = x.node();
  Node<T>* pw = weight.node();
  Node<T>* pb = bias.node();
  return MakeResult<T>(Shape{n, out_f}, std::move(out), {x, weight, bias}, [=](Node<T>& self) {
    if (T* gx = GradOf(px)) {
      Gemm(false, false, n, in, out_f, T(1), self.grad.data(), pw->value.data(), T(1), gx);
    }
    if (T* gw = GradOf(pw)) {
      Gemm(true, false, out_f, in, n, T(1), self.grad.data(), px->value.data(), T(1), gw);
    }
    if (T* gb = GradOf(pb)) {
      for (int b = 0; b < n; ++b) {
        for (int o = 0; o < out_f; ++o) gb[o] += self.grad[static_cast<size_t>(b) * out_f + o];
      }
    }
  });
}

// -------------------------------------------------------------------- special

template <typename T>
Var<T> WarpBackward(const Var<T>& x, std::span<const T> flow) {
  RequireRank(x, 4, "WarpBackward");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const size_t plane = static_cast<size_t>(h) * w;
  Require(flow.size() == static_cast<size_t>(n) * 2 * plane, ErrorCode::kShapeMismatch,
          "WarpBackward: flow does not match frame " + ShapeStr(x.shape()));
  std::vector<BilinearTap> taps(static_cast<size_t>(n) * plane);
  for (int b = 0; b < n; ++b) {
    const T* fx = flow.data() + static_cast<size_t>(b) * 2 * plane;
    const T* fy = fx + plane;
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        const size_t i = static_cast<size_t>(y) * w + xx;
        taps[b * plane + i] = MakeBilinearTap(xx + static_cast<double>(fx[i]),
                                              y + static_cast<double>(fy[i]), w, h);
      }
    }
  }
  auto xv = x.value();
  std::vector<T> out(xv.size());
  for (int b = 0; b < n; ++b) {
    for (int ch = 0; ch < c; ++ch) {
      const T* src = xv.data() + (static_cast<size_t>(b) * c + ch) * plane;
      T* dst = out.data() + (static_cast<size_t>(b) * c + ch) * plane;
      for (size_t i = 0; i < plane; ++i) {
        const BilinearTap& t = taps[b * plane + i];
        dst[i] = static_cast<T>(t.w00 * src[t.i00] + t.w01 * src[t.i01] + t.w10 * src[t.i10] +
                                t.w11 * src[t.i11]);
      }
    }
  }
  Node<T>* px = x.node();
  return MakeResult<T>(x.shape(), std::move(out), {x},
                       [px, n, c, plane, taps = std::move(taps)](Node<T>& self) {
                         T* gx = GradOf(px);
                         if (!gx) return;
                         for (int b = 0; b < n; ++b) {
                           for (int ch = 0; ch < c; ++ch) {
                             const size_t off = (static_cast<size_t>(b) * c + ch) * plane;
                             T* g = gx + off;
                             const T* dy = self.grad.data() + off;
                             for (size_t i = 0; i < plane; ++i) {
                               const BilinearTap& t = taps[b * plane + i];
                               g[t.i00] += static_cast<T>(t.w00 * dy[i]);
                               g[t.i01] += static_cast<T>(t.w01 * dy[i]);
                               g[t.i10] += static_cast<T>(t.w10 * dy[i]);
                               g[t.i11] += static_cast<T>(t.w11 * dy[i]);
                             }
                           }
                         }
                       });
}

template <typename T>
Var<T> WarpBackward(const Var<T>& x, const Var<T>& flow) {
  RequireRank(x, 4, "WarpBackward");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  Require(flow.shape() == Shape{n, 2, h, w}, ErrorCode::kShapeMismatch,
          "WarpBackward: flow " + ShapeStr(flow.shape()) + " does not match frame " + ShapeStr(x.shape()));
  const size_t plane = static_cast<size_t>(h) * w;
  auto fv = flow.value();
  // Per output pixel: bilinear taps and whether each coordinate is inside the frame.
  struct Sample {
    BilinearTap tap;
    double fx, fy;
    bool free_x, free_y;
  };
  std::vector<Sample> samples(static_cast<size_t>(n) * plane);
  for (int b = 0; b < n; ++b) {
    const T* fx = fv.data() + static_cast<size_t>(b) * 2 * plane;
    const T* fy = fx + plane;
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        const size_t i = static_cast<size_t>(y) * w + xx;
        const double sx = xx + static_cast<double>(fx[i]), sy = y + static_cast<double>(fy[i]);
        const double cx = std::clamp(sx, 0.0, w - 1.0), cy = std::clamp(sy, 0.0, h - 1.0);
        samples[b * plane + i] = {MakeBilinearTap(sx, sy, w, h), cx - std::floor(cx), cy - std::floor(cy),
                                  sx > 0.0 && sx < w - 1.0, sy > 0.0 && sy < h - 1.0};
      }
    }
  }
  auto xv = x.value();
  std::vector<T> out(xv.size());
  for (int b = 0; b < n; ++b) {
    for (int ch = 0; ch < c; ++ch) {
      const T* src = xv.data() + (static_cast<size_t>(b) * c + ch) * plane;
      T* dst = out.data() + (static_cast<size_t>(b) * c + ch) * plane;
      for (size_t i = 0; i < plane; ++i) {
        const BilinearTap& t = samples[b * plane + i].tap;
        dst[i] = static_cast<T>(t.w00 * src[t.i00] + t.w01 * src[t.i01] + t.w10 * src[t.i10] + t.w11 * src[t.i11]);
      }
    }
  }
  Node<T>* px = x.node();
  Node<T>* pf = flow.node();
  return MakeResult<T>(x.shape(), std::move(out), {x, flow},
                       [px, pf, n, c, plane, samples = std::move(samples)](Node<T>& self) {
                         T* gx = GradOf(px);
                         T* gf = GradOf(pf);
                         const T* xs = px->value.data();
                         for (int b = 0; b < n; ++b) {
                           for (int ch = 0; ch < c; ++ch) {
                             const size_t off = (static_cast<size_t>(b) * c + ch) * plane;
                             const T* dy = self.grad.data() + off;
                             const T* src = xs + off;
                             for (size_t i = 0; i < plane; ++i) {
                               const Sample& s = samples[b * plane + i];
                               const BilinearTap& t = s.tap;
                               if (gx) {
                                 T* g = gx + off;
                                 g[t.i00] += static_cast<T>(t.w00 * dy[i]);
                                 g[t.i01] += static_cast<T>(t.w01 * dy[i]);
                                 g[t.i10] += static_cast<T>(t.w10 * dy[i]);
                                 g[t.i11] += static_cast<T>(t.w11 * dy[i]);
                               }
                               if (gf) {
                                 T* g = gf + static_cast<size_t>(b) * 2 * plane;
                                 if (s.free_x) {
                                   const double d = (1.0 - s.fy) * (src[t.i01] - src[t.i00]) +
                                                    s.fy * (src[t.i11] - src[t.i10]);
                                   g[i] += static_cast<T>(d * dy[i]);
                                 }
                                 if (s.free_y) {
                                   const double d = (1.0 - s.fx) * (src[t.i10] - src[t.i00]) +
                                                    s.fx * (src[t.i11] - src[t.i01]);
                                   g[plane + i] += static_cast<T>(d * dy[i]);
                                 }
                               }
                             }
                           }
                         }
                       });
}

template <typename T>
Var<T> Gram(const Var<T>& x) {
  RequireRank(x, 4, "Gram");
  const int n = x.dim(0), c = x.dim(1);
  const int hw = x.dim(2) * x.dim(3);
  const T norm = T(1) / (static_cast<T>(c) * static_cast<T>(hw));
  std::vector<T> out(static_cast<size_t>(n) * c * c);
  auto xv = x.value();
  for (int b = 0; b < n; ++b) {
    const T* xb = xv.data() + static_cast<size_t>(b) * c * hw;
    Gemm(false, true, c, c, hw, norm, xb, xb, T(0), out.data() + static_cast<size_t>(b) * c * c);
  }
  Node<T>* px = x.node();
  return MakeResult<T>(Shape{n, c, c}, std::move(out), {x}, [=](Node<T>& self) {
    T* gx = GradOf(px);
    if (!gx) return;
    std::vector<T> sym(static_cast<size_t>(c) * c);
    for (int b = 0; b < n; ++b) {
      const T* dg = self.grad.data() + static_cast<size_t>(b) * c * c;
      for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) sym[i * c + j] = dg[i * c + j] + dg[j * c + i];
      }
      Gemm(false, false, c, hw, c, norm, sym.data(),
           px->value.data() + static_cast<size_t>(b) * c * hw, T(1),
           gx + static_cast<size_t>(b) * c * hw);
    }
  });
}

template <typename T>
Var<T> SpectralNormalizedWeight(const Var<T>& weight, PowerIterationState<T>& state, bool update,
                                int iterations, T eps) {
  Require(weight.rank() >= 2, ErrorCode::kShapeMismatch, "SpectralNormalizedWeight: rank < 2");
  const int rows = weight.dim(0);
  const int cols = static_cast<int>(weight.numel() / rows);
  auto wv = weight.value();
  if (state.u.size() != static_cast<size_t>(rows)) {
    state.u.assign(rows, T(1) / std::sqrt(static_cast<T>(rows)));
  }
  auto normalize = [eps](std::vector<T>& v) {
    T s = T(0);
    for (T e : v) s += e * e;
    const T nrm = std::max(std::sqrt(s), eps);
    for (T& e : v) e /= nrm;
  };
  std::vector<T> u = state.u;
  std::vector<T> v = state.v;
  const bool need_v = v.size() != static_cast<size_t>(cols);
  const int steps = update ? std::max(iterations, 1) : 0;
  if (need_v || update) v.assign(cols, T(0));
  if (need_v && !update) {
    Gemm(true, false, cols, 1, rows, T(1), wv.data(), u.data(), T(0), v.data());
    normalize(v);
  }
  for (int it = 0; it < steps; ++it) {
    Gemm(true, false, cols, 1, rows, T(1), wv.data(), u.data(), T(0), v.data());
    normalize(v);
    Gemm(false, false, rows, 1, cols, T(1), wv.data(), v.data(), T(0), u.data());
    normalize(u);
  }
  if (update) {
    state.u = u;
    state.v = v;
  }
  std::vector<T> wvv(rows);
  Gemm(false, false, rows, 1, cols, T(1), wv.data(), v.data(), T(0), wvv.data());
  T sigma = T(0);
  for (int i = 0; i < rows; ++i) sigma += u[i] * wvv[i];
  const bool degenerate = !(sigma > eps);
  const T denom = degenerate ? eps : sigma;
  std::vector<T> out(wv.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = wv[i] / denom;
  Node<T>* pw = weight.node();
  return MakeResult<T>(weight.shape(), std::move(out), {weight},
                       [pw, u, v, denom, degenerate, rows, cols](Node<T>& self) {
                         T* gw = GradOf(pw);
                         if (!gw) return;
                         T s = T(0);
                         if (!degenerate) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             s += self.grad[i] * self.value[i];
                           }
                         }
                         for (int r = 0; r < rows; ++r) {
                           for (int q = 0; q < cols; ++q) {
                             const size_t i = static_cast<size_t>(r) * cols + q;
                             gw[i] += (self.grad[i] - s * u[r] * v[q]) / denom;
                           }
                         }
                       });
}

#define HDRGAN_INSTANTIATE_OPS(T)                                                              \
  template Var<T> Add(const Var<T>&, const Var<T>&);                                           \
  template Var<T> Sub(const Var<T>&, const Var<T>&);                                           \
  template Var<T> Mul(const Var<T>&, const Var<T>&);                                           \
  template Var<T> Scale(const Var<T>&, T);                                                     \
  template Var<T> AddScalar(const Var<T>&, T);                                                 \
  template Var<T> Relu(const Var<T>&);                                                         \
  template Var<T> LeakyRelu(const Var<T>&, T);                                                 \
  template Var<T> Sigmoid(const Var<T>&);                                                      \
  template Var<T> Clamp(const Var<T>&, T, T);                                                  \
  template Var<T> Sum(const Var<T>&);                                                          \
  template Var<T> Mean(const Var<T>&);                                                         \
  template Var<T> MeanAbsDiff(const Var<T>&, const Var<T>&);                                   \
  template Var<T> MeanSquaredDiff(const Var<T>&, const Var<T>&);                               \
  template Var<T> SqrtScalar(const Var<T>&);                                                   \
  template Var<T> MeanLogClamped(const Var<T>&, T);                                            \
  template Var<T> MeanLogOneMinusClamped(const Var<T>&, T);                                    \
  template Var<T> Reshape(const Var<T>&, Shape);                                               \
  template Var<T> ConcatChannels(const std::vector<Var<T>>&);                                  \
  template Var<T> ConcatBatch(const std::vector<Var<T>>&);                                     \
  template Var<T> SliceBatch(const Var<T>&, int, int);                                         \
  template Var<T> ReflectPad(const Var<T>&, int, int, int, int);                               \
  template Var<T> Crop(const Var<T>&, int, int, int, int);                                     \
  template Var<T> Conv2d(const Var<T>&, const Var<T>&, const Var<T>&, int, int);               \
  template Var<T> ConvTranspose2d(const Var<T>&, const Var<T>&, const Var<T>&, int, int);      \
  template Var<T> BatchNorm2d(const Var<T>&, const Var<T>&, const Var<T>&, std::vector<T>&,    \
                              std::vector<T>&, bool, T, T);                                    \
  template Var<T> InstanceNorm2d(const Var<T>&, T);                                            \
  template Var<T> MaxPool2x2(const Var<T>&);                                                   \
  template Var<T> GlobalAvgPool(const Var<T>&);                                                \
  template Var<T> Linear(const Var<T>&, const Var<T>&, const Var<T>&);                         \
  template Var<T> WarpBackward(const Var<T>&, std::span<const T>);                             \
  template Var<T> WarpBackward(const Var<T>&, const Var<T>&);                                  \
  template Var<T> Gram(const Var<T>&);                                                         \
  template Var<T> SpectralNormalizedWeight(const Var<T>&, PowerIterationState<T>&, bool, int, T);

HDRGAN_INSTANTIATE_OPS(float)
HDRGAN_INSTANTIATE_OPS(double)

#undef HDRGAN_INSTANTIATE_OPS

}  // namespace hdrgan::nn
