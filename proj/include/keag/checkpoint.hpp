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

#ifndef KEAG_CHECKPOINT_HPP_
#define KEAG_CHECKPOINT_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "keag/model.hpp"
#include "keag/params.hpp"

namespace keag {

// Binary layout, all integers little-endian:
//   "KEAGCKPT" | u32 version | u64 step | u64 vocab hash
//   | u64 config length | config bytes | u64 tensor count
//   | per tensor: u64 name length, name, u32 rank, u64 extents..., f64 data...
//   | u64 FNV-1a checksum of every preceding byte
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint64_t step = 0;
  std::uint64_t vocab_hash = 0;
  std::string config_text;
  ParameterStore params;
};

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path);

// Throws CorruptFile on truncation or checksum failure, and VersionMismatch
// on a foreign version or a vocabulary hash other than `expected_vocab_hash`.
Checkpoint ParseCheckpoint(const std::string& bytes,
                           std::optional<std::uint64_t> expected_vocab_hash = std::nullopt);
Checkpoint LoadCheckpoint(const std::string& path,
                          std::optional<std::uint64_t> expected_vocab_hash = std::nullopt);

// Model dimensions recovered from parameter shapes. use_knowledge is not
// encoded in shapes and defaults to true.
ModelConfig InferModelConfig(const ParameterStore& params);

}  // namespace keag

#endif  // KEAG_CHECKPOINT_HPP_
