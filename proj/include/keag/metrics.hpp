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

#ifndef KEAG_METRICS_HPP_
#define KEAG_METRICS_HPP_

#include <span>
#include <vector>

#include "keag/text.hpp"

namespace keag {

inline constexpr double kRougeBetaSquared = 1.44;

// LCS-based F-measure. Throws EmptyInput if either side is empty.
double RougeL(std::span<const std::string> candidate, std::span<const std::string> reference);

// Corpus-level clipped unigram precision times the brevity penalty. Throws
// LengthMismatch for unequal or empty lists; an all-empty candidate side
// scores 0.
double Bleu1(std::span<const Tokens> candidates, std::span<const Tokens> references);

struct MetricReport {
  double rouge_l = 0.0;  // mean over examples
  double bleu_1 = 0.0;
  std::vector<double> rouge_per_example;
};

// Empty candidates score 0 ROUGE-L instead of failing.
MetricReport Evaluate(std::span<const Tokens> candidates, std::span<const Tokens> references);

}  // namespace keag

#endif  // KEAG_METRICS_HPP_
