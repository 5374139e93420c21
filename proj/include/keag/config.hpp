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

#ifndef KEAG_CONFIG_HPP_
#define KEAG_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "keag/generator.hpp"
#include "keag/model.hpp"
#include "keag/text.hpp"
#include "keag/trainer.hpp"

namespace keag {

struct DataConfig {
  std::size_t vocab_size = 50000;
  std::size_t min_count = 1;
  std::size_t max_facts = 1000;
  TextLimits limits;
};

struct PathConfig {
  std::string train;        // JSONL dataset used for vocabulary and training
  std::string eval;         // JSONL dataset read by generate / extract-facts
  std::string kb;           // TSV triples
  std::string vocab;        // one token per line
  std::string embeddings;   // optional text embeddings
  std::string checkpoint;
  std::string metrics_log;  // JSONL, one record per step
  std::string output;       // predictions / fact records
};

// Everything a command needs. Defaults are the paper's settings.
struct RunConfig {
  ModelConfig model;
  DataConfig data;
  TrainingConfig train;
  GenerationConfig generate;
  PathConfig paths;
  std::size_t log_every = 50;

  // TOML-like text: `[section]` headers, `key = value` lines, `#` comments.
  // Unknown keys and malformed values throw Config errors.
  void Parse(std::istream& in, const std::string& origin = "<config>");
  void LoadFile(const std::string& path);
  // `key` is "section.name".
  void Set(std::string_view key, std::string_view value);
  std::string Get(std::string_view key) const;
  std::vector<std::string> Keys() const;

  // Canonical text form; parsing it reproduces this config.
  std::string ToText() const;
  // Checks dimension and schedule constraints.
  void Validate() const;
};

}  // namespace keag

#endif  // KEAG_CONFIG_HPP_
