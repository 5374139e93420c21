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

#include "keag/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "keag/error.hpp"

namespace keag::ad {

const char* OpKindName(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "mul";
    case OpKind::kConcat: return "concat";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLog: return "log";
    case OpKind::kSum: return "sum";
    case OpKind::kLookup: return "lookup";
    case OpKind::kSlice: return "slice";
    case OpKind::kScale: return "scale";
    case OpKind::kMinimum: return "minimum";
    case OpKind::kReshape: return "reshape";
  }
  return "?";
}

const Tensor& Var::value() const { return tape->value(*this); }

namespace {

[[noreturn]] void Mismatch(const char* op, const Shape& a, const Shape& b) {
  throw Error(ErrorKind::kShapeMismatch, std::string(op) + " " +
                                             ShapeString(a) + " vs " +
                                             ShapeString(b));
}

Tape& SameTape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw Error(ErrorKind::kInvalidArgument, "operands live on different tapes");
  }
  return *a.tape;
}

// Broadcast-compatible binary layout: equal shapes, or rank-2 lhs with a
// rank-1 rhs matching its column count.
bool RowBroadcast(const Shape& a, const Shape& b) {
  return a.size() == 2 && b.size() == 1 && a[1] == b[0];
}

void Accumulate(std::vector<Tensor>& grads, std::vector<bool>& has,
                std::size_t i, const Shape& shape) {
  if (!has[i]) {
    grads[i] = Tensor(shape, 0.0);
    has[i] = true;
  }
}

}  // namespace

// --------------------------------------------------------------------------
// Tape

Var Tape::leaf(Tensor value) {
  TapeNode n;
  n.kind = OpKind::kLeaf;
  n.needs_grad = value.requires_grad();
  n.value = std::move(value);
  if (!n.value.all_finite()) {
    throw Error(ErrorKind::kNonFiniteValue, "leaf tensor has non-finite values");
  }
  return record(std::move(n));
}

Var Tape::constant(Tensor value) {
  value.set_requires_grad(false);
  return leaf(std::move(value));
}

Var Tape::record(TapeNode node) {
  if (consumed_) {
    throw Error(ErrorKind::kTapeConsumed, "tape already consumed by backward");
  }
  if (node.kind != OpKind::kLeaf) {
    if (!node.value.all_finite()) {
      throw Error(ErrorKind::kNonFiniteValue,
                  std::string("non-finite output from ") + OpKindName(node.kind));
    }
    node.needs_grad = false;
    for (std::size_t in : node.inputs) {
      if (nodes_[in].needs_grad) node.needs_grad = true;
    }
  }
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

const Tensor& Gradients::operator[](Var leaf) const {
  if (leaf.index >= by_node_.size() || !has_[leaf.index]) {
    throw Error(ErrorKind::kInvalidArgument,
                "no gradient recorded for node " + std::to_string(leaf.index));
  }
  return by_node_[leaf.index];
}

bool Gradients::is_disconnected(Var leaf) const {
  return std::find(disconnected_.begin(), disconnected_.end(), leaf.index) !=
         disconnected_.end();
}

Gradients Tape::backward(Var loss) {
  if (loss.tape != this) {
    throw Error(ErrorKind::kInvalidArgument, "loss belongs to another tape");
  }
  if (consumed_) {
    throw Error(ErrorKind::kTapeConsumed, "backward already ran on this tape");
  }
  if (value(loss).size() != 1) {
    throw Error(ErrorKind::kShapeMismatch,
                "loss must be scalar, got " + ShapeString(value(loss).shape()));
  }
  consumed_ = true;

  std::vector<Tensor> grads(nodes_.size());
  std::vector<bool> has(nodes_.size(), false);
  grads[loss.index] = Tensor(value(loss).shape(), 1.0);
  has[loss.index] = true;

  for (std::size_t k = loss.index + 1; k-- > 0;) {
    if (!has[k] || !nodes_[k].needs_grad) continue;
    if (nodes_[k].kind == OpKind::kLeaf) continue;
    backprop_node(k, grads, has);
  }

  Gradients out;
  out.by_node_.resize(nodes_.size());
  out.has_.assign(nodes_.size(), false);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const TapeNode& n = nodes_[k];
    if (n.kind != OpKind::kLeaf || !n.needs_grad) continue;
    if (has[k]) {
      if (!grads[k].all_finite()) {
        throw Error(ErrorKind::kNonFiniteGradient,
                    "non-finite gradient at leaf " + std::to_string(k));
      }
      out.by_node_[k] = std::move(grads[k]);
    } else {
      out.by_node_[k] = Tensor(n.value.shape(), 0.0);
      out.disconnected_.push_back(k);
    }
    out.has_[k] = true;
  }
  return out;
}

void Tape::backprop_node(std::size_t i, std::vector<Tensor>& grads,
                         std::vector<bool>& has) {
  const TapeNode& n = nodes_[i];
  const Tensor& g = grads[i];
  const Tensor& y = n.value;
  auto want = [&](std::size_t slot) {
    return nodes_[n.inputs[slot]].needs_grad;
  };
  auto target = [&](std::size_t slot) -> Tensor& {
    const std::size_t in = n.inputs[slot];
    Accumulate(grads, has, in, nodes_[in].value.shape());
    return grads[in];
  };

  switch (n.kind) {
    case OpKind::kLeaf:
      return;
    case OpKind::kMatmul: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      if (a.rank() == 2 && b.rank() == 2) {
        const std::size_t m = a.rows(), k = a.cols(), p = b.cols();
        if (want(0)) {
          Tensor& ga = target(0);
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < p; ++c) {
              const double gv = g[r * p + c];
              if (gv == 0.0) continue;
              for (std::size_t j = 0; j < k; ++j) ga[r * k + j] += gv * b[j * p + c];
            }
          }
        }
        if (want(1)) {
          Tensor& gb = target(1);
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < k; ++j) {
              const double av = a[r * k + j];
              if (av == 0.0) continue;
              for (std::size_t c = 0; c < p; ++c) gb[j * p + c] += av * g[r * p + c];
            }
          }
        }
      } else if (a.rank() == 2) {  // [m,k] x [k]
        const std::size_t m = a.rows(), k = a.cols();
        if (want(0)) {
          Tensor& ga = target(0);
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < k; ++j) ga[r * k + j] += g[r] * b[j];
          }
        }
        if (want(1)) {
          Tensor& gb = target(1);
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < k; ++j) gb[j] += a[r * k + j] * g[r];
          }
        }
      } else {  // [k] x [k,p]
        const std::size_t k = b.rows(), p = b.cols();
        if (want(0)) {
          Tensor& ga = target(0);
          for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < p; ++c) s += b[j * p + c] * g[c];
            ga[j] += s;
          }
        }
        if (want(1)) {
          Tensor& gb = target(1);
          for (std::size_t j = 0; j < k; ++j) {
            const double av = a[j];
            if (av == 0.0) continue;
            for (std::size_t c = 0; c < p; ++c) gb[j * p + c] += av * g[c];
          }
        }
      }
      return;
    }
    case OpKind::kAdd: {
      if (want(0)) {
        Tensor& ga = target(0);
        for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j];
      }
      if (want(1)) {
        Tensor& gb = target(1);
        const std::size_t nb = gb.size();
        for (std::size_t j = 0; j < g.size(); ++j) gb[j % nb] += g[j];
      }
      return;
    }
    case OpKind::kMul: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      const std::size_t nb = b.size();
      if (want(0)) {
        Tensor& ga = target(0);
        for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * b[j % nb];
      }
      if (want(1)) {
        Tensor& gb = target(1);
        for (std::size_t j = 0; j < g.size(); ++j) gb[j % nb] += g[j] * a[j];
      }
      return;
    }
    case OpKind::kConcat: {
      if (y.rank() == 1 || n.axis == 0) {
        std::size_t offset = 0;
        for (std::size_t s = 0; s < n.inputs.size(); ++s) {
          const std::size_t len = nodes_[n.inputs[s]].value.size();
          if (want(s)) {
            Tensor& gs = target(s);
            for (std::size_t j = 0; j < len; ++j) gs[j] += g[offset + j];
          }
          offset += len;
        }
      } else {
        const std::size_t rows = y.rows(), width = y.cols();
        std::size_t col0 = 0;
        for (std::size_t s = 0; s < n.inputs.size(); ++s) {
          const std::size_t w = nodes_[n.inputs[s]].value.cols();
          if (want(s)) {
            Tensor& gs = target(s);
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t c = 0; c < w; ++c) {
                gs[r * w + c] += g[r * width + col0 + c];
              }
            }
          }
          col0 += w;
        }
      }
      return;
    }
    case OpKind::kTanh: {
      Tensor& ga = target(0);
      for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * (1.0 - y[j] * y[j]);
      return;
    }
    case OpKind::kSigmoid: {
      Tensor& ga = target(0);
      for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * y[j] * (1.0 - y[j]);
      return;
    }
    case OpKind::kSoftmax: {
      Tensor& ga = target(0);
      const std::size_t width = y.rank() == 1 ? y.size() : y.cols();
      const std::size_t rows = y.size() / width;
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t o = r * width;
        double dot = 0.0;
        for (std::size_t c = 0; c < width; ++c) dot += g[o + c] * y[o + c];
        for (std::size_t c = 0; c < width; ++c) {
          ga[o + c] += y[o + c] * (g[o + c] - dot);
        }
      }
      return;
    }
    case OpKind::kLog: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      Tensor& ga = target(0);
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (a[j] > n.factor) ga[j] += g[j] / a[j];
      }
      return;
    }
    case OpKind::kSum: {
      Tensor& ga = target(0);
      for (std::size_t j = 0; j < ga.size(); ++j) ga[j] += g[0];
      return;
    }
    case OpKind::kLookup: {
      Tensor& gt = target(0);
      const std::size_t width = gt.rank() == 1 ? 1 : gt.cols();
      for (std::size_t r = 0; r < n.ids.size(); ++r) {
        const std::size_t base = n.ids[r] * width;
        for (std::size_t c = 0; c < width; ++c) gt[base + c] += g[r * width + c];
      }
      return;
    }
    case OpKind::kSlice: {
      Tensor& ga = target(0);
      const Tensor& a = nodes_[n.inputs[0]].value;
      if (a.rank() == 1 || n.axis == 0) {
        const std::size_t offset = n.begin * (a.rank() == 1 ? 1 : a.cols());
        for (std::size_t j = 0; j < g.size(); ++j) ga[offset + j] += g[j];
      } else {
        const std::size_t w = y.cols(), aw = a.cols();
        for (std::size_t r = 0; r < y.rows(); ++r) {
          for (std::size_t c = 0; c < w; ++c) ga[r * aw + n.begin + c] += g[r * w + c];
        }
      }
      return;
    }
    case OpKind::kScale: {
      Tensor& ga = target(0);
      for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * n.factor;
      return;
    }
    case OpKind::kMinimum: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      if (want(0)) {
        Tensor& ga = target(0);
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (a[j] <= b[j]) ga[j] += g[j];
        }
      }
      if (want(1)) {
        Tensor& gb = target(1);
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (b[j] < a[j]) gb[j] += g[j];
        }
      }
      return;
    }
    case OpKind::kReshape: {
      Tensor& ga = target(0);
      for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j];
      return;
    }
  }
}

// --------------------------------------------------------------------------
// Primitive ops

Var matmul(Var a, Var b) {
  Tape& tape = SameTape(a, b);
  const Tensor& x = a.value();
  const Tensor& w = b.value();
  TapeNode n;
  n.kind = OpKind::kMatmul;
  n.inputs = {a.index, b.index};
  if (x.rank() == 2 && w.rank() == 2) {
    if (x.cols() != w.rows()) Mismatch("matmul", x.shape(), w.shape());
    const std::size_t m = x.rows(), k = x.cols(), p = w.cols();
    Tensor out({m, p}, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < k; ++j) {
        const double xv = x[r * k + j];
        if (xv == 0.0) continue;
        for (std::size_t c = 0; c < p; ++c) out[r * p + c] += xv * w[j * p + c];
      }
    }
    n.value = std::move(out);
  } else if (x.rank() == 2 && w.rank() == 1) {
    if (x.cols() != w.size()) Mismatch("matmul", x.shape(), w.shape());
    const std::size_t m = x.rows(), k = x.cols();
    Tensor out({m}, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += x[r * k + j] * w[j];
      out[r] = s;
    }
    n.value = std::move(out);
  } else if (x.rank() == 1 && w.rank() == 2) {
    if (x.size() != w.rows()) Mismatch("matmul", x.shape(), w.shape());
    const std::size_t k = w.rows(), p = w.cols();
    Tensor out({p}, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const double xv = x[j];
      if (xv == 0.0) continue;
      for (std::size_t c = 0; c < p; ++c) out[c] += xv * w[j * p + c];
    }
    n.value = std::move(out);
  } else {
    Mismatch("matmul", x.shape(), w.shape());
  }
  return tape.record(std::move(n));
}

namespace {

Var Elementwise(Var a, Var b, OpKind kind, const char* name) {
  Tape& tape = SameTape(a, b);
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  if (x.shape() != z.shape() && !RowBroadcast(x.shape(), z.shape())) {
    Mismatch(name, x.shape(), z.shape());
  }
  TapeNode n;
  n.kind = kind;
  n.inputs = {a.index, b.index};
  Tensor out(x.shape(), 0.0);
  const std::size_t nz = z.size();
  if (kind == OpKind::kAdd) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j] + z[j % nz];
  } else {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j] * z[j % nz];
  }
  n.value = std::move(out);
  return tape.record(std::move(n));
}

template <typename F>
Var Unary(Var a, OpKind kind, F f) {
  TapeNode n;
  n.kind = kind;
  n.inputs = {a.index};
  const Tensor& x = a.value();
  Tensor out(x.shape(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = f(x[j]);
  n.value = std::move(out);
  return a.tape->record(std::move(n));
}

}  // namespace

Var add(Var a, Var b) { return Elementwise(a, b, OpKind::kAdd, "add"); }
Var mul(Var a, Var b) { return Elementwise(a, b, OpKind::kMul, "mul"); }
Var sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "concat of zero tensors");
  }
  Tape& tape = *parts[0].tape;
  const std::size_t rank = parts[0].value().rank();
  TapeNode n;
  n.kind = OpKind::kConcat;
  n.axis = axis;
  for (const Var& p : parts) {
    SameTape(parts[0], p);
    if (p.value().rank() != rank) Mismatch("concat", parts[0].shape(), p.shape());
    n.inputs.push_back(p.index);
  }
  if (rank == 1) {
    if (axis != 0) Mismatch("concat", parts[0].shape(), parts[0].shape());
    std::vector<double> data;
    for (const Var& p : parts) {
      data.insert(data.end(), p.value().data().begin(), p.value().data().end());
    }
    n.value = Tensor::Vector(std::move(data));
  } else if (axis == 0) {
    const std::size_t cols = parts[0].value().cols();
    std::size_t rows = 0;
    std::vector<double> data;
    for (const Var& p : parts) {
      if (p.value().cols() != cols) Mismatch("concat", parts[0].shape(), p.shape());
      rows += p.value().rows();
      data.insert(data.end(), p.value().data().begin(), p.value().data().end());
    }
    n.value = Tensor::Matrix(rows, cols, std::move(data));
  } else if (axis == 1) {
    const std::size_t rows = parts[0].value().rows();
    std::size_t cols = 0;
    for (const Var& p : parts) {
      if (p.value().rows() != rows) Mismatch("concat", parts[0].shape(), p.shape());
      cols += p.value().cols();
    }
    Tensor out({rows, cols}, 0.0);
    std::size_t col0 = 0;
    for (const Var& p : parts) {
      const Tensor& t = p.value();
      const std::size_t w = t.cols();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < w; ++c) out[r * cols + col0 + c] = t[r * w + c];
      }
      col0 += w;
    }
    n.value = std::move(out);
  } else {
    Mismatch("concat", parts[0].shape(), parts[0].shape());
  }
  return tape.record(std::move(n));
}

Var tanh(Var a) {
  return Unary(a, OpKind::kTanh, [](double v) { return std::tanh(v); });
}

Var sigmoid(Var a) {
  return Unary(a, OpKind::kSigmoid, [](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

Var softmax(Var a) {
  const Tensor& x = a.value();
  const std::size_t width = x.rank() == 1 ? x.size() : x.cols();
  const std::size_t rows = x.size() / width;
  Tensor out(x.shape(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t o = r * width;
    double mx = x[o];
    for (std::size_t c = 1; c < width; ++c) mx = std::max(mx, x[o + c]);
    double z = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      out[o + c] = std::exp(x[o + c] - mx);
      z += out[o + c];
    }
    for (std::size_t c = 0; c < width; ++c) out[o + c] /= z;
  }
  TapeNode n;
  n.kind = OpKind::kSoftmax;
  n.inputs = {a.index};
  n.value = std::move(out);
  return a.tape->record(std::move(n));
}

Var log(Var a, double floor) {
  const Tensor& x = a.value();
  Tensor out(x.shape(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (floor > 0.0) {
      out[j] = std::log(std::max(x[j], floor));
    } else if (x[j] <= 0.0) {
      throw Error(ErrorKind::kNonFiniteValue,
                  "log of non-positive value " + std::to_string(x[j]));
    } else {
      out[j] = std::log(x[j]);
    }
  }
  TapeNode n;
  n.kind = OpKind::kLog;
  n.inputs = {a.index};
  n.factor = floor;
  n.value = std::move(out);
  return a.tape->record(std::move(n));
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  TapeNode n;
  n.kind = OpKind::kSum;
  n.inputs = {a.index};
  n.value = Tensor::Scalar(s);
  return a.tape->record(std::move(n));
}

Var lookup(Var table, std::span<const std::size_t> ids) {
  const Tensor& t = table.value();
  if (ids.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "lookup with no ids");
  }
  const std::size_t width = t.rank() == 1 ? 1 : t.cols();
  std::vector<double> data;
  data.reserve(ids.size() * width);
  for (std::size_t id : ids) {
    if (id >= t.rows()) {
      throw Error(ErrorKind::kShapeMismatch,
                  "lookup id " + std::to_string(id) + " outside table " +
                      ShapeString(t.shape()));
    }
    data.insert(data.end(), t.data().begin() + static_cast<std::ptrdiff_t>(id * width),
                t.data().begin() + static_cast<std::ptrdiff_t>((id + 1) * width));
  }
  TapeNode n;
  n.kind = OpKind::kLookup;
  n.inputs = {table.index};
  n.ids.assign(ids.begin(), ids.end());
  n.value = t.rank() == 1 ? Tensor::Vector(std::move(data))
                          : Tensor::Matrix(ids.size(), width, std::move(data));
  return table.tape->record(std::move(n));
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t length) {
  const Tensor& x = a.value();
  const std::size_t extent = axis < x.rank() ? x.shape()[axis] : 0;
  if (axis >= x.rank() || length == 0 || begin + length > extent) {
    throw Error(ErrorKind::kShapeMismatch,
                "slice [" + std::to_string(begin) + ", +" + std::to_string(length) +
                    ") on axis " + std::to_string(axis) + " of " +
                    ShapeString(x.shape()));
  }
  TapeNode n;
  n.kind = OpKind::kSlice;
  n.inputs = {a.index};
  n.axis = axis;
  n.begin = begin;
  if (x.rank() == 1) {
    n.value = Tensor::Vector(std::vector<double>(
        x.data().begin() + static_cast<std::ptrdiff_t>(begin),
        x.data().begin() + static_cast<std::ptrdiff_t>(begin + length)));
  } else if (axis == 0) {
    const std::size_t w = x.cols();
    n.value = Tensor::Matrix(
        length, w,
        std::vector<double>(x.data().begin() + static_cast<std::ptrdiff_t>(begin * w),
                            x.data().begin() +
                                static_cast<std::ptrdiff_t>((begin + length) * w)));
  } else {
    const std::size_t w = x.cols();
    Tensor out({x.rows(), length}, 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < length; ++c) out[r * length + c] = x[r * w + begin + c];
    }
    n.value = std::move(out);
  }
  return a.tape->record(std::move(n));
}

Var scale(Var a, double factor) {
  TapeNode n;
  n.kind = OpKind::kScale;
  n.inputs = {a.index};
  n.factor = factor;
  const Tensor& x = a.value();
  Tensor out(x.shape(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] * factor;
  n.value = std::move(out);
  return a.tape->record(std::move(n));
}

Var minimum(Var a, Var b) {
  Tape& tape = SameTape(a, b);
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  if (x.shape() != z.shape()) Mismatch("minimum", x.shape(), z.shape());
  Tensor out(x.shape(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = std::min(x[j], z[j]);
  TapeNode n;
  n.kind = OpKind::kMinimum;
  n.inputs = {a.index, b.index};
  n.value = std::move(out);
  return tape.record(std::move(n));
}

Var reshape(Var a, Shape shape) {
  const Tensor& x = a.value();
  if (NumElements(shape) != x.size()) Mismatch("reshape", x.shape(), shape);
  TapeNode n;
  n.kind = OpKind::kReshape;
  n.inputs = {a.index};
  n.value = Tensor(std::move(shape), x.values());
  return a.tape->record(std::move(n));
}

Var row(Var a, std::size_t i) {
  const Tensor& x = a.value();
  if (x.rank() != 2) Mismatch("row", x.shape(), x.shape());
  return reshape(slice(a, 0, i, 1), {x.cols()});
}

// --------------------------------------------------------------------------
// Gradient check

GradientCheckReport gradient_check(const TapeFunction& f,
                                   std::span<const Tensor> points, double eps,
                                   double threshold) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw Error(ErrorKind::kInvalidArgument, "eps must lie in [1e-7, 1e-3]");
  }
  std::vector<Tensor> grads;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& p : points) {
      Tensor t = p;
      vars.push_back(tape.leaf(std::move(t.set_requires_grad(true))));
    }
    Var out = f(tape, vars);
    Gradients g = tape.backward(out);
    for (const Var& v : vars) grads.push_back(g[v]);
  }

  auto evaluate = [&](const std::vector<Tensor>& at) {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& p : at) vars.push_back(tape.constant(p));
    return f(tape, vars).scalar();
  };

  GradientCheckReport report;
  std::vector<Tensor> probe(points.begin(), points.end());
  for (std::size_t s = 0; s < probe.size(); ++s) {
    for (std::size_t j = 0; j < probe[s].size(); ++j) {
      const double orig = probe[s][j];
      probe[s][j] = orig + eps;
      const double up = evaluate(probe);
      probe[s][j] = orig - eps;
      const double down = evaluate(probe);
      probe[s][j] = orig;
      const double fd = (up - down) / (2.0 * eps);
      const double an = grads[s][j];
      const double abs_err = std::abs(fd - an);
      const double rel = abs_err / std::max({std::abs(fd), std::abs(an), 1e-3});
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_input = s;
        report.worst_element = j;
      }
      ++report.checked;
    }
  }
  report.flagged = report.max_rel_error > threshold;
  return report;
}

GradientCheckReport gradient_check(const std::function<Var(Tape&, Var)>& f,
                                   const Tensor& point, double eps,
                                   double threshold) {
  const Tensor points[] = {point};
  return gradient_check(
      [&](Tape& tape, std::span<const Var> vars) { return f(tape, vars[0]); },
      points, eps, threshold);
}

}  // namespace keag::ad
