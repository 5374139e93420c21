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

#ifndef KEAG_TEXT_HPP_
#define KEAG_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "keag/tensor.hpp"

namespace keag {

using Tokens = std::vector<std::string>;
using TokenIds = std::vector<std::size_t>;

// Lowercases ASCII letters and splits on whitespace; every ASCII punctuation
// character becomes its own token. Bytes >= 0x80 are treated as word
// characters so UTF-8 sequences stay intact.
Tokens Tokenize(std::string_view text);

std::string JoinTokens(std::span<const std::string> tokens);

class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::size_t kBos = 2;
  static constexpr std::size_t kEos = 3;
  static constexpr std::size_t kNumSpecials = 4;

  Vocabulary();

  // Keeps the (max_size - 4) most frequent tokens that occur at least
  // min_count times; ties are broken lexicographically.
  static Vocabulary Build(std::span<const Tokens> corpus, std::size_t max_size,
                          std::size_t min_count = 1);
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  static Vocabulary Load(const std::string& path);
  void Save(const std::string& path) const;

  std::size_t size() const { return token_by_id_.size(); }
  bool contains(std::string_view token) const;
  std::size_t id(std::string_view token) const;  // kUnk when absent
  const std::string& token(std::size_t id) const;
  TokenIds Encode(std::span<const std::string> tokens) const;
  const std::vector<std::string>& tokens() const { return token_by_id_; }

  // FNV-1a over the newline-joined token list.
  std::uint64_t Hash() const;

 private:
  std::unordered_map<std::string, std::size_t> id_by_token_;
  std::vector<std::string> token_by_id_;
};

struct TextLimits {
  std::size_t passage = 800;
  std::size_t answer = 120;
};

// One encoded (question, passage, answer) instance. Raw lowercased tokens
// are kept alongside ids for copy matching and fact extraction.
struct Example {
  TokenIds question_ids;
  TokenIds passage_ids;
  TokenIds answer_ids;  // EOS-terminated
  Tokens question;
  Tokens passage;
  Tokens answer;  // without EOS
};

Example EncodeExample(std::string_view question, std::string_view passage,
                      std::string_view answer, const Vocabulary& vocab,
                      const TextLimits& limits);

struct RawExample {
  std::string question;
  std::string passage;
  std::string answer;
};

// JSON-lines with "question", "passage" and "answer". "passage" (or
// "passages") may be an array, whose entries are joined with spaces; an
// array-valued answer uses its first entry.
std::vector<RawExample> LoadDataset(const std::string& path);

struct EmbeddingTable {
  ad::Tensor matrix;  // |V| x dim
  std::size_t dim = 0;
  std::size_t covered = 0;  // rows copied from the file
};

// Plain-text word vectors: a token followed by `dim` decimals per line.
// Rows not covered by the file are uniform in [-0.1, 0.1] from `seed`.
EmbeddingTable LoadPretrainedEmbeddings(const std::string& path,
                                        const Vocabulary& vocab,
                                        std::size_t dim, std::uint64_t seed);
EmbeddingTable RandomEmbeddings(const Vocabulary& vocab, std::size_t dim,
                                std::uint64_t seed);

std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace keag

#endif  // KEAG_TEXT_HPP_
