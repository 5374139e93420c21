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

#include "keag/params.hpp"

#include "keag/error.hpp"

namespace keag {

std::size_t ParameterStore::Add(std::string name, ad::Tensor value) {
  if (by_name_.contains(name)) {
    throw Error(ErrorKind::kInvalidArgument, "duplicate parameter " + name);
  }
  by_name_.emplace(name, values_.size());
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return values_.size() - 1;
}

std::size_t ParameterStore::AddUniform(std::string name, ad::Shape shape,
                                       double range, Rng& rng) {
  ad::Tensor t(std::move(shape), 0.0);
  for (double& v : t.data()) v = rng.uniform(-range, range);
  return Add(std::move(name), std::move(t));
}

std::size_t ParameterStore::index(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) {
    throw Error(ErrorKind::kInvalidArgument, "unknown parameter " + std::string(name));
  }
  return it->second;
}

bool ParameterStore::contains(std::string_view name) const {
  return by_name_.contains(std::string(name));
}

std::size_t ParameterStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

std::vector<ad::Var> ParameterStore::Bind(ad::Tape& tape, bool trainable) const {
  std::vector<ad::Var> vars;
  vars.reserve(values_.size());
  for (const auto& v : values_) {
    ad::Tensor copy = v;
    vars.push_back(trainable ? tape.leaf(std::move(copy.set_requires_grad(true)))
                             : tape.constant(std::move(copy)));
  }
  return vars;
}

}  // namespace keag
