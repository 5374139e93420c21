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

#include "keag/knowledge.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "keag/error.hpp"

namespace keag {

KnowledgeBase KnowledgeBase::Ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open knowledge file " + path);
  return Parse(in);
}

KnowledgeBase KnowledgeBase::Parse(std::istream& in) {
  KnowledgeBase kb;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      kb.malformed_lines_.push_back(line_no);
      continue;
    }
    const std::string_view view(line);
    try {
      kb.Add(view.substr(0, t1), view.substr(t1 + 1, t2 - t1 - 1), view.substr(t2 + 1));
    } catch (const Error&) {
      kb.malformed_lines_.push_back(line_no);
    }
  }
  return kb;
}

std::size_t KnowledgeBase::Add(std::string_view subject, std::string_view relation,
                               std::string_view object) {
  Fact f;
  f.subject = Tokenize(subject);
  f.object = Tokenize(object);
  std::string rel(relation);
  if (f.subject.empty() || f.object.empty() || rel.empty()) {
    throw Error(ErrorKind::kMalformedLine, "fact needs subject, relation and object");
  }
  auto [it, inserted] = relation_ids_.emplace(rel, relation_names_.size());
  if (inserted) relation_names_.push_back(rel);
  f.relation = it->second;
  f.fact_id = facts_.size();

  std::unordered_set<std::string> seen;
  for (const Tokens* side : {&f.subject, &f.object}) {
    for (const std::string& tok : *side) {
      if (seen.insert(tok).second) surface_index_[tok].push_back(f.fact_id);
    }
  }
  facts_.push_back(std::move(f));
  return facts_.back().fact_id;
}

std::span<const std::size_t> KnowledgeBase::facts_with_token(
    const std::string& token) const {
  auto it = surface_index_.find(token);
  if (it == surface_index_.end()) return {};
  return it->second;
}

PhraseIndex::PhraseIndex(std::span<const std::string> tokens) : tokens_(tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) positions_[tokens[i]].push_back(i);
}

bool PhraseIndex::contains(std::span<const std::string> phrase) const {
  if (phrase.empty()) return false;
  auto it = positions_.find(phrase[0]);
  if (it == positions_.end()) return false;
  for (std::size_t start : it->second) {
    if (start + phrase.size() > tokens_.size()) break;
    if (std::equal(phrase.begin(), phrase.end(), tokens_.begin() + static_cast<std::ptrdiff_t>(start))) {
      return true;
    }
  }
  return false;
}

int ScoreFact(const Fact& fact, const PhraseIndex& question,
              const PhraseIndex& passage) {
  const bool subj_q = question.contains(fact.subject);
  const bool subj_p = passage.contains(fact.subject);
  const bool obj_p = passage.contains(fact.object);
  int score = 0;
  if (subj_q && obj_p) score += 4;
  if (subj_p && obj_p) score += 2;
  if (subj_q || subj_p) score += 1;
  return score;
}

std::vector<ScoredFact> ExtractRelatedFacts(const KnowledgeBase& kb,
                                            std::span<const std::string> question,
                                            std::span<const std::string> passage,
                                            std::size_t max_facts) {
  if (max_facts == 0) {
    throw Error(ErrorKind::kInvalidArgument, "max_facts must be at least 1");
  }
  const PhraseIndex q_index(question);
  const PhraseIndex p_index(passage);

  std::vector<std::size_t> candidates;
  auto gather = [&](const PhraseIndex& index) {
    for (const auto& [tok, _] : index.positions()) {
      auto ids = kb.facts_with_token(tok);
      candidates.insert(candidates.end(), ids.begin(), ids.end());
    }
  };
  gather(q_index);
  gather(p_index);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<ScoredFact> scored;
  for (std::size_t id : candidates) {
    const Fact& f = kb.fact(id);
    // Candidates need a full subject or object occurrence, not just a shared
    // token; non-candidates can only score zero anyway.
    const int score = ScoreFact(f, q_index, p_index);
    if (score > 0) scored.push_back({id, score});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredFact& a, const ScoredFact& b) { return a.score > b.score; });
  if (scored.size() > max_facts) scored.resize(max_facts);
  return scored;
}

}  // namespace keag
