/* Copyright 2026 The KEAG Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#ifndef KEAG_AUTODIFF_HPP_
#define KEAG_AUTODIFF_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "keag/tensor.hpp"

namespace keag::ad {

enum class OpKind {
  kLeaf,
  kMatmul,
  kAdd,
  kMul,
  kConcat,
  kTanh,
  kSigmoid,
  kSoftmax,
  kLog,
  kSum,
  kLookup,
  kSlice,
  kScale,
  kMinimum,
  kReshape,
};

const char* OpKindName(OpKind kind);

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t index = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  double scalar() const { return value()[0]; }
};

struct TapeNode {
  OpKind kind = OpKind::kLeaf;
  std::vector<std::size_t> inputs;
  Tensor value;
  bool needs_grad = false;
  // Op-specific payload.
  std::vector<std::size_t> ids;  // lookup rows
  std::size_t axis = 0;
  std::size_t begin = 0;
  double factor = 0.0;  // scale factor, log floor
};

// Gradients of a scalar loss with respect to every requires_grad leaf.
class Gradients {
 public:
  // Gradient for a leaf. Leaves not reachable from the loss get a zero tensor
  // and are listed in disconnected().
  const Tensor& operator[](Var leaf) const;
  const std::vector<std::size_t>& disconnected() const { return disconnected_; }
  bool is_disconnected(Var leaf) const;

 private:
  friend class Tape;
  std::vector<Tensor> by_node_;
  std::vector<bool> has_;
  std::vector<std::size_t> disconnected_;
};

// Append-only record of forward operations. Node indices are a topological
// order. A tape may be consumed by backward() exactly once. References
// returned by value() stay valid for the lifetime of the tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value);
  Var constant(Tensor value);

  const Tensor& value(Var v) const { return nodes_[v.index].value; }
  const TapeNode& node(Var v) const { return nodes_[v.index]; }
  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  Gradients backward(Var loss);

  // Used by the op functions; not meant for direct use.
  Var record(TapeNode node);

 private:
  void backprop_node(std::size_t i, std::vector<Tensor>& grads,
                     std::vector<bool>& has);

  std::deque<TapeNode> nodes_;
  bool consumed_ = false;
};

// Primitive ops. All validate shapes (ShapeMismatch) and check that outputs
// are finite (NonFiniteValue).
//
// matmul: [m,k]x[k,n] -> [m,n]; [m,k]x[k] -> [m]; [k]x[k,n] -> [n].
Var matmul(Var a, Var b);
// add/mul: equal shapes, or [m,n] with a length-n vector broadcast over rows.
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var sub(Var a, Var b);
// Rank-1 inputs along axis 0, or rank-2 inputs along axis 0 or 1.
Var concat(std::span<const Var> parts, std::size_t axis = 0);
Var tanh(Var a);
Var sigmoid(Var a);
// Row-wise over the last axis, max-subtracted.
Var softmax(Var a);
// log(max(a, floor)); gradient is zero where the floor is active. A floor of
// zero makes non-positive inputs an error.
Var log(Var a, double floor = 0.0);
Var sum(Var a);
// Gather rows of a [V,d] table (-> [n,d]) or entries of a [V] vector (-> [n]).
Var lookup(Var table, std::span<const std::size_t> ids);
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t length);
Var scale(Var a, double factor);
Var minimum(Var a, Var b);
Var reshape(Var a, Shape shape);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

// Row i of a rank-2 node as a rank-1 node.
Var row(Var a, std::size_t i);

struct GradientCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_element = 0;
  std::size_t checked = 0;
  bool flagged = false;  // max_rel_error above threshold
};

using TapeFunction = std::function<Var(Tape&, std::span<const Var>)>;

// Compares tape gradients against central finite differences at `points`.
// Relative error is |tape - fd| / max(|tape|, |fd|, 1e-3).
GradientCheckReport gradient_check(const TapeFunction& f,
                                   std::span<const Tensor> points,
                                   double eps = 1e-5,
                                   double threshold = 1e-4);

GradientCheckReport gradient_check(const std::function<Var(Tape&, Var)>& f,
                                   const Tensor& point, double eps = 1e-5,
                                   double threshold = 1e-4);

}  // namespace keag::ad

#endif  // KEAG_AUTODIFF_HPP_
