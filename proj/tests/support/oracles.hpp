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

// Independent reference implementations used by the unit and acceptance
// suites. Nothing here calls into the code path it is checking.

#ifndef KEAG_TESTS_ORACLES_HPP_
#define KEAG_TESTS_ORACLES_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "keag/knowledge.hpp"
#include "keag/rng.hpp"

namespace keag::oracle {

inline bool NaiveOccurs(const std::vector<std::string>& phrase,
                        const std::vector<std::string>& text) {
  if (phrase.empty() || phrase.size() > text.size()) return false;
  for (std::size_t s = 0; s + phrase.size() <= text.size(); ++s) {
    bool all = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) {
      if (text[s + k] != phrase[k]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

// Scores every fact in the knowledge base by the literal rules, with no
// index, then sorts by (score desc, id asc).
inline std::vector<ScoredFact> BruteForceFacts(const KnowledgeBase& kb,
                                               const std::vector<std::string>& q,
                                               const std::vector<std::string>& p,
                                               std::size_t n_f) {
  std::vector<ScoredFact> out;
  for (const Fact& f : kb.facts()) {
    const bool sq = NaiveOccurs(f.subject, q), sp = NaiveOccurs(f.subject, p);
    const bool oq = NaiveOccurs(f.object, q), op = NaiveOccurs(f.object, p);
    if (!(sq || sp || oq || op)) continue;
    int score = 0;
    if (sq && op) score += 4;
    if (sp && op) score += 2;
    if (sq || sp) score += 1;
    if (score > 0) out.push_back({f.fact_id, score});
  }
  std::sort(out.begin(), out.end(), [](const ScoredFact& a, const ScoredFact& b) {
    return a.score != b.score ? a.score > b.score : a.fact_id < b.fact_id;
  });
  if (out.size() > n_f) out.resize(n_f);
  return out;
}

// Random instance over a small alphabet so that phrase matches are common.
struct FactInstance {
  KnowledgeBase kb;
  std::vector<std::string> question;
  std::vector<std::string> passage;
};

inline FactInstance RandomFactInstance(Rng& rng, std::size_t max_facts) {
  auto word = [&] { return "t" + std::to_string(rng.below(40)); };
  auto phrase = [&] {
    std::string s = word();
    const std::size_t extra = rng.below(3) == 0 ? rng.below(2) + 1 : 0;
    for (std::size_t k = 0; k < extra; ++k) s += " " + word();
    return s;
  };
  FactInstance inst;
  const std::size_t n = 1 + rng.below(max_facts);
  const char* relations[] = {"IsA", "UsedFor", "AtLocation", "PartOf"};
  for (std::size_t i = 0; i < n; ++i) {
    inst.kb.Add(phrase(), relations[rng.below(4)], phrase());
  }
  const std::size_t nq = 1 + rng.below(8), np = 1 + rng.below(40);
  for (std::size_t i = 0; i < nq; ++i) inst.question.push_back(word());
  for (std::size_t i = 0; i < np; ++i) inst.passage.push_back(word());
  return inst;
}

}  // namespace keag::oracle

#endif  // KEAG_TESTS_ORACLES_HPP_
