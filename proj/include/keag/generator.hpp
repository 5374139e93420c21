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

#ifndef KEAG_GENERATOR_HPP_
#define KEAG_GENERATOR_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keag/knowledge.hpp"
#include "keag/model.hpp"
#include "keag/selectors.hpp"
#include "keag/text.hpp"

namespace keag {

struct GenerationConfig {
  std::size_t beam = 4;
  std::size_t max_length = 120;  // answer tokens, end marker excluded
};

// One emitted token. Continuation records carry the remaining words of a
// multi-word fact object; they reuse the selecting step's source
// probabilities and add nothing to the score.
struct TraceRecord {
  std::string token;
  std::array<double, kNumSources> source_probs{};
  Source source = Source::kVocabulary;
  double word_prob = 1.0;  // P(token | source)
  std::optional<std::size_t> fact_id;
  bool continuation = false;
};

using SourceTrace = std::vector<TraceRecord>;

struct GenerationResult {
  Tokens answer;          // without the end marker
  SourceTrace trace;      // includes the end marker when one was emitted
  double score = 0.0;     // sum of log P(source) + log P(token | source)
  double normalized_score = 0.0;  // score / trace length
};

// Deterministic beam search. `facts` are the related facts in rank order.
GenerationResult Generate(const KeagModel& model, const Vocabulary& vocab,
                          const Example& example, std::span<const Fact> facts,
                          const GenerationConfig& config);

// Log-score recomputed from a trace, in emission order.
double TraceScore(const SourceTrace& trace);

// Aligned text table: one row per source with percentages, then the chosen
// source per token.
std::string RenderTrace(const SourceTrace& trace);

}  // namespace keag

#endif  // KEAG_GENERATOR_HPP_
