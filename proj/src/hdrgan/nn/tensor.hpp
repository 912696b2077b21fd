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
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hdrgan/common/error.hpp"

namespace hdrgan::nn {

using Shape = std::vector<int>;

inline size_t Numel(const Shape& s) {
  size_t n = 1;
  for (int d : s) n *= static_cast<size_t>(d);
  return n;
}

inline std::string ShapeStr(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// Thread-local switch; inference code wraps itself in NoGradGuard so that no
// graph is recorded.
class GradMode {
 public:
  static bool Enabled() noexcept { return enabled_; }
  static void SetEnabled(bool on) noexcept { enabled_ = on; }

 private:
  static inline thread_local bool enabled_ = true;
};

class NoGradGuard {
 public:
  NoGradGuard() : prev_(GradMode::Enabled()) { GradMode::SetEnabled(false); }
  ~NoGradGuard() { GradMode::SetEnabled(prev_); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad and accumulates into parents' grad.
  std::function<void(Node&)> backward;

  std::vector<T>& EnsureGrad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad;
  }
};

// Handle to a node of the dynamic graph. Copies share the node.
template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Var Constant(Shape shape, std::vector<T> values) {
    Require(Numel(shape) == values.size(), ErrorCode::kShapeMismatch,
            "Var::Constant: value count does not match shape " + ShapeStr(shape));
    auto n = std::make_shared<Node<T>>();
    n->shape = std::move(shape);
    n->value = std::move(values);
    return Var(std::move(n));
  }
  static Var Zeros(Shape shape) {
    const size_t count = Numel(shape);
    return Constant(std::move(shape), std::vector<T>(count, T(0)));
  }
  static Var Full(Shape shape, T v) {
    const size_t count = Numel(shape);
    return Constant(std::move(shape), std::vector<T>(count, v));
  }
  static Var Parameter(Shape shape, std::vector<T> values) {
    Var v = Constant(std::move(shape), std::move(values));
    v.node_->requires_grad = true;
    return v;
  }

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int dim(size_t i) const { return node_->shape.at(i); }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  size_t numel() const { return node_->value.size(); }

  std::span<const T> value() const { return node_->value; }
  std::span<T> mutable_value() { return node_->value; }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->EnsureGrad(); }
  T item() const {
    Require(numel() == 1, ErrorCode::kShapeMismatch, "item() on non-scalar " + ShapeStr(shape()));
    return node_->value[0];
  }

  bool requires_grad() const { return node_ && node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }

  void ZeroGrad() {
    if (node_) std::fill(node_->grad.begin(), node_->grad.end(), T(0));
  }

  // Fresh leaf holding a copy of the value; the graph is not retained.
  Var Detach() const { return Constant(shape(), node_->value); }

  // Reverse-mode sweep from a scalar root. Gradients accumulate into every
  // reachable node that requires grad.
  void Backward() const;

  Node<T>* node() const noexcept { return node_.get(); }
  const std::shared_ptr<Node<T>>& node_ptr() const noexcept { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

// Creates the result node of an op. Parents and the backward closure are
// kept only when grad mode is on and some parent requires grad.
template <typename T>
Var<T> MakeResult(Shape shape, std::vector<T> value, std::vector<Var<T>> parents,
                  std::function<void(Node<T>&)> backward) {
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  bool needs = false;
  if (GradMode::Enabled()) {
    for (const auto& p : parents) needs = needs || p.requires_grad();
  }
  if (needs) {
    n->requires_grad = true;
    for (auto& p : parents) {
      if (p.defined()) n->parents.push_back(p.node_ptr());
    }
    n->backward = std::move(backward);
  }
  return Var<T>(std::move(n));
}

template <typename T>
void Var<T>::Backward() const {
  Require(defined() && numel() == 1, ErrorCode::kShapeMismatch, "Backward() needs a scalar root");
  if (!node_->requires_grad) return;
  std::vector<Node<T>*> order;
  std::vector<std::pair<Node<T>*, size_t>> stack;
  // Iterative post-order DFS; graphs here are a few hundred nodes deep.
  std::unordered_set<Node<T>*> marked;
  stack.emplace_back(node_.get(), 0);
  marked.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, idx] = stack.back();
    if (idx < n->parents.size()) {
      Node<T>* p = n->parents[idx++].get();
      if (p->requires_grad && !marked.count(p)) {
        marked.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  node_->EnsureGrad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

}  // namespace hdrgan::nn
