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

#include "keag/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "keag/error.hpp"
#include "keag/rng.hpp"

namespace keag {

namespace {

const char* const kSpecialTokens[] = {"<pad>", "<unk>", "<s>", "</s>"};

bool IsAsciiPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }
bool IsAsciiSpace(unsigned char c) { return c < 0x80 && std::isspace(c); }

}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Tokens Tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (unsigned char c : text) {
    if (IsAsciiSpace(c)) {
      flush();
    } else if (IsAsciiPunct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                 : static_cast<char>(c));
    }
  }
  flush();
  return out;
}

std::string JoinTokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// --------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  for (const char* s : kSpecialTokens) {
    id_by_token_.emplace(s, token_by_id_.size());
    token_by_id_.emplace_back(s);
  }
}

Vocabulary Vocabulary::Build(std::span<const Tokens> corpus,
                             std::size_t max_size, std::size_t min_count) {
  if (max_size < kNumSpecials) {
    throw Error(ErrorKind::kInvalidArgument,
                "vocabulary max_size must be at least 4");
  }
  std::map<std::string, std::size_t> counts;
  for (const Tokens& seq : corpus) {
    for (const std::string& t : seq) ++counts[t];
  }
  if (counts.empty()) {
    throw Error(ErrorKind::kEmptyCorpus, "no tokens to build a vocabulary from");
  }
  Vocabulary vocab;
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= min_count && !vocab.id_by_token_.contains(tok)) ranked.emplace_back(tok, n);
  }
  // std::map iteration is already lexicographic, so a stable sort on count
  // leaves ties in lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t room = max_size - kNumSpecials;
  for (std::size_t i = 0; i < ranked.size() && i < room; ++i) {
    vocab.id_by_token_.emplace(ranked[i].first, vocab.token_by_id_.size());
    vocab.token_by_id_.push_back(ranked[i].first);
  }
  return vocab;
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  for (std::size_t i = 0; i < kNumSpecials; ++i) {
    if (i >= tokens.size() || tokens[i] != kSpecialTokens[i]) {
      throw Error(ErrorKind::kMalformedLine,
                  "vocabulary must start with <pad> <unk> <s> </s>");
    }
  }
  Vocabulary vocab;
  for (std::size_t i = kNumSpecials; i < tokens.size(); ++i) {
    if (!vocab.id_by_token_.emplace(tokens[i], vocab.token_by_id_.size()).second) {
      throw Error(ErrorKind::kMalformedLine,
                  "duplicate vocabulary entry '" + tokens[i] + "'");
    }
    vocab.token_by_id_.push_back(std::move(tokens[i]));
  }
  return vocab;
}

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open vocabulary " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return FromTokens(std::move(tokens));
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write vocabulary " + path);
  for (const std::string& t : token_by_id_) out << t << '\n';
}

bool Vocabulary::contains(std::string_view token) const {
  return id_by_token_.contains(std::string(token));
}

std::size_t Vocabulary::id(std::string_view token) const {
  auto it = id_by_token_.find(std::string(token));
  return it == id_by_token_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::size_t id) const {
  if (id >= token_by_id_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "token id " + std::to_string(id) + " out of range");
  }
  return token_by_id_[id];
}

TokenIds Vocabulary::Encode(std::span<const std::string> tokens) const {
  TokenIds ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(id(t));
  return ids;
}

std::uint64_t Vocabulary::Hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::string& t : token_by_id_) {
    h = Fnv1a64(t, h);
    h = Fnv1a64("\n", h);
  }
  return h;
}

// --------------------------------------------------------------------------
// Examples

Example EncodeExample(std::string_view question, std::string_view passage,
                      std::string_view answer, const Vocabulary& vocab,
                      const TextLimits& limits) {
  Example ex;
  ex.question = Tokenize(question);
  if (ex.question.empty()) {
    throw Error(ErrorKind::kEmptyQuestion, "question has no tokens");
  }
  ex.passage = Tokenize(passage);
  if (ex.passage.empty()) {
    throw Error(ErrorKind::kEmptySequence, "passage has no tokens");
  }
  if (ex.passage.size() > limits.passage) ex.passage.resize(limits.passage);
  ex.answer = Tokenize(answer);
  if (ex.answer.size() > limits.answer) ex.answer.resize(limits.answer);

  ex.question_ids = vocab.Encode(ex.question);
  ex.passage_ids = vocab.Encode(ex.passage);
  ex.answer_ids = vocab.Encode(ex.answer);
  ex.answer_ids.push_back(Vocabulary::kEos);
  return ex;
}

namespace {

std::string JoinedText(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!item.is_string()) continue;
      if (!out.empty()) out.push_back(' ');
      out += item.get<std::string>();
    }
    return out;
  }
  return {};
}

}  // namespace

std::vector<RawExample> LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open dataset " + path);
  std::vector<RawExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kMalformedLine,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("question")) {
      throw Error(ErrorKind::kMalformedLine,
                  path + ":" + std::to_string(line_no) + ": missing \"question\"");
    }
    RawExample ex;
    ex.question = JoinedText(j["question"]);
    if (j.contains("passage")) {
      ex.passage = JoinedText(j["passage"]);
    } else if (j.contains("passages")) {
      ex.passage = JoinedText(j["passages"]);
    }
    if (j.contains("answer")) {
      const auto& a = j["answer"];
      ex.answer = a.is_array() && !a.empty() && a[0].is_string()
                      ? a[0].get<std::string>()
                      : JoinedText(a);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

// --------------------------------------------------------------------------
// Embeddings

EmbeddingTable RandomEmbeddings(const Vocabulary& vocab, std::size_t dim,
                                std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "embedding dim must be positive");
  EmbeddingTable table;
  table.dim = dim;
  table.matrix = ad::Tensor({vocab.size(), dim}, 0.0);
  Rng rng(seed);
  for (double& v : table.matrix.data()) v = rng.uniform(-0.1, 0.1);
  return table;
}

EmbeddingTable LoadPretrainedEmbeddings(const std::string& path,
                                        const Vocabulary& vocab,
                                        std::size_t dim, std::uint64_t seed) {
  EmbeddingTable table = RandomEmbeddings(vocab, dim, seed);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open embeddings " + path);
  std::vector<bool> seen(vocab.size(), false);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    values.clear();
    std::string field;
    while (fields >> field) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorKind::kMalformedLine,
                    path + ":" + std::to_string(line_no) + ": bad number '" + field + "'");
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw Error(ErrorKind::kDimensionMismatch,
                  path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " values, got " + std::to_string(values.size()));
    }
    if (!vocab.contains(token)) continue;
    const std::size_t id = vocab.id(token);
    if (seen[id]) continue;
    seen[id] = true;
    ++table.covered;
    std::copy(values.begin(), values.end(),
              table.matrix.data().begin() + static_cast<std::ptrdiff_t>(id * dim));
  }
  return table;
}

}  // namespace keag
