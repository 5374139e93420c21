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

#ifndef KEAG_PARAMS_HPP_
#define KEAG_PARAMS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "keag/autodiff.hpp"
#include "keag/rng.hpp"

namespace keag {

// Named trainable tensors, kept in registration order.
class ParameterStore {
 public:
  std::size_t Add(std::string name, ad::Tensor value);
  // Uniform in [-range, range], drawn in registration order.
  std::size_t AddUniform(std::string name, ad::Shape shape, double range, Rng& rng);

  std::size_t size() const { return values_.size(); }
  std::size_t index(std::string_view name) const;
  bool contains(std::string_view name) const;
  const std::string& name(std::size_t i) const { return names_[i]; }
  ad::Tensor& value(std::size_t i) { return values_[i]; }
  const ad::Tensor& value(std::size_t i) const { return values_[i]; }
  ad::Tensor& value(std::string_view name) { return values_[index(name)]; }
  const ad::Tensor& value(std::string_view name) const { return values_[index(name)]; }
  std::size_t total_elements() const;

  // Places every tensor on `tape`: as gradient leaves when `trainable`,
  // otherwise as constants. Returned vars follow registration order.
  std::vector<ad::Var> Bind(ad::Tape& tape, bool trainable) const;

 private:
  std::vector<std::string> names_;
  std::vector<ad::Tensor> values_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

}  // namespace keag

#endif  // KEAG_PARAMS_HPP_
