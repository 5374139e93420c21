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

#include "keag/tensor.hpp"

#include <cmath>
#include <sstream>

#include "keag/error.hpp"

namespace keag::ad {

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

void ValidateShape(const Shape& shape) {
  if (shape.empty() || shape.size() > 2) {
    throw Error(ErrorKind::kShapeMismatch,
                "tensor rank must be 1 or 2, got " + ShapeString(shape));
  }
  for (std::size_t e : shape) {
    if (e == 0) {
      throw Error(ErrorKind::kShapeMismatch,
                  "zero extent in shape " + ShapeString(shape));
    }
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  ValidateShape(shape_);
  data_.assign(NumElements(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  ValidateShape(shape_);
  if (NumElements(shape_) != data_.size()) {
    throw Error(ErrorKind::kShapeMismatch,
                "shape " + ShapeString(shape_) + " needs " +
                    std::to_string(NumElements(shape_)) + " values, got " +
                    std::to_string(data_.size()));
  }
}

Tensor Tensor::Vector(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> data) {
  return Tensor({rows, cols}, std::move(data));
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

}  // namespace keag::ad
