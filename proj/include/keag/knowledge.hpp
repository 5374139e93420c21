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

#ifndef KEAG_KNOWLEDGE_HPP_
#define KEAG_KNOWLEDGE_HPP_

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "keag/text.hpp"

namespace keag {

// (subject, relation, object) triple. Subject and object may be multi-word.
struct Fact {
  Tokens subject;
  std::size_t relation = 0;
  Tokens object;
  std::size_t fact_id = 0;
};

struct ScoredFact {
  std::size_t fact_id = 0;
  int score = 0;

  friend bool operator==(const ScoredFact&, const ScoredFact&) = default;
};

class KnowledgeBase {
 public:
  // Tab-separated "subject<TAB>relation<TAB>object" lines. Malformed lines
  // are skipped and counted.
  static KnowledgeBase Ingest(const std::string& path);
  static KnowledgeBase Parse(std::istream& in);

  // Returns the new fact id, or throws MalformedLine when subject or object
  // tokenizes to nothing.
  std::size_t Add(std::string_view subject, std::string_view relation,
                  std::string_view object);

  const std::vector<Fact>& facts() const { return facts_; }
  const Fact& fact(std::size_t id) const { return facts_.at(id); }
  std::size_t size() const { return facts_.size(); }
  const std::vector<std::string>& relation_names() const { return relation_names_; }
  std::size_t relation_count() const { return relation_names_.size(); }

  // Fact ids whose subject or object contains `token`, ascending.
  std::span<const std::size_t> facts_with_token(const std::string& token) const;

  std::size_t malformed_lines() const { return malformed_lines_.size(); }
  const std::vector<std::size_t>& malformed_line_numbers() const {
    return malformed_lines_;
  }

 private:
  std::vector<Fact> facts_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, std::size_t> relation_ids_;
  std::unordered_map<std::string, std::vector<std::size_t>> surface_index_;
  std::vector<std::size_t> malformed_lines_;
};

// Token -> positions index over one text, for contiguous-phrase queries.
class PhraseIndex {
 public:
  explicit PhraseIndex(std::span<const std::string> tokens);
  bool contains(std::span<const std::string> phrase) const;
  bool has_token(const std::string& token) const { return positions_.contains(token); }
  const std::unordered_map<std::string, std::vector<std::size_t>>& positions() const {
    return positions_;
  }

 private:
  std::span<const std::string> tokens_;
  std::unordered_map<std::string, std::vector<std::size_t>> positions_;
};

// Additive relevance rules for one fact against a (question, passage) pair:
//   +4 subject in question and object in passage
//   +2 subject and object both in passage
//   +1 subject in question or passage
int ScoreFact(const Fact& fact, const PhraseIndex& question,
              const PhraseIndex& passage);

// Candidates are facts whose subject or object occurs in the question or
// passage. Zero-scored candidates are dropped; the rest are sorted by score
// descending, then fact id ascending, and cut to `max_facts`.
std::vector<ScoredFact> ExtractRelatedFacts(const KnowledgeBase& kb,
                                            std::span<const std::string> question,
                                            std::span<const std::string> passage,
                                            std::size_t max_facts);

}  // namespace keag

#endif  // KEAG_KNOWLEDGE_HPP_
