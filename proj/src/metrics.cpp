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

#include "keag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "keag/error.hpp"

namespace keag {

namespace {

std::size_t Lcs(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

double RougeL(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) {
    throw Error(ErrorKind::kEmptyInput, "ROUGE-L needs non-empty candidate and reference");
  }
  const double lcs = static_cast<double>(Lcs(candidate, reference));
  if (lcs == 0.0) return 0.0;
  const double r = lcs / static_cast<double>(reference.size());
  const double p = lcs / static_cast<double>(candidate.size());
  return (1.0 + kRougeBetaSquared) * r * p / (r + kRougeBetaSquared * p);
}

double Bleu1(std::span<const Tokens> candidates, std::span<const Tokens> references) {
  if (candidates.size() != references.size() || candidates.empty()) {
    throw Error(ErrorKind::kLengthMismatch,
                "BLEU-1 needs equally many candidates and references (" +
                    std::to_string(candidates.size()) + " vs " +
                    std::to_string(references.size()) + ")");
  }
  double clipped = 0.0, cand_len = 0.0, ref_len = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::map<std::string, std::size_t> ref_counts;
    for (const auto& t : references[i]) ++ref_counts[t];
    std::map<std::string, std::size_t> cand_counts;
    for (const auto& t : candidates[i]) ++cand_counts[t];
    for (const auto& [token, n] : cand_counts) {
      auto it = ref_counts.find(token);
      if (it != ref_counts.end()) clipped += static_cast<double>(std::min(n, it->second));
    }
    cand_len += static_cast<double>(candidates[i].size());
    ref_len += static_cast<double>(references[i].size());
  }
  if (cand_len == 0.0) return 0.0;
  const double bp = std::exp(std::min(0.0, 1.0 - ref_len / cand_len));
  return clipped / cand_len * bp;
}

MetricReport Evaluate(std::span<const Tokens> candidates, std::span<const Tokens> references) {
  MetricReport report;
  report.bleu_1 = Bleu1(candidates, references);
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double r = candidates[i].empty() || references[i].empty()
                         ? 0.0
                         : RougeL(candidates[i], references[i]);
    report.rouge_per_example.push_back(r);
    total += r;
  }
  report.rouge_l = total / static_cast<double>(candidates.size());
  return report;
}

}  // namespace keag
