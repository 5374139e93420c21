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

#ifndef KEAG_SYNTH_HPP_
#define KEAG_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "keag/text.hpp"

namespace keag {

enum class SynthTask { kCopyQuestion, kCopyPassage, kVocabFill, kKbLookup, kMixed };

SynthTask ParseSynthTask(std::string_view name);  // throws Config
const char* SynthTaskName(SynthTask task);

struct SynthTriple {
  std::string subject;
  std::string relation;
  std::string object;
};

struct SynthDataset {
  std::vector<RawExample> examples;
  // Knowledge-only answer word per example (empty for tasks without one).
  std::vector<std::string> targets;
  std::vector<SynthTriple> kb;
};

// Deterministic in (task, size, seed). Knowledge objects are unique per
// example and never occur in any question, passage or other answer, so they
// stay out of a min_count >= 2 vocabulary.
SynthDataset GenerateSynth(SynthTask task, std::size_t size, std::uint64_t seed);

// Writes <dir>/data.jsonl and <dir>/kb.tsv, creating `dir` if needed.
void WriteSynth(const SynthDataset& dataset, const std::string& dir);

}  // namespace keag

#endif  // KEAG_SYNTH_HPP_
