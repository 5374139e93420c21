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

#include "keag/synth.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "keag/error.hpp"
#include "keag/rng.hpp"

namespace keag {

namespace {

constexpr std::array<const char*, 40> kNouns = {
    "river", "stone", "cloud", "garden", "window", "engine", "forest", "island",
    "candle", "mirror", "bottle", "ladder", "pocket", "basket", "rocket", "violin",
    "desert", "castle", "harbor", "meadow", "pencil", "jacket", "wagon", "saddle",
    "anchor", "lantern", "marble", "helmet", "feather", "blanket", "kettle", "tunnel",
    "valley", "bridge", "orchard", "compass", "thimble", "glacier", "prairie", "chimney"};

constexpr std::array<const char*, 10> kFillers = {"the", "a", "of", "and", "it",
                                                  "was", "there", "some", "many", "very"};

constexpr std::array<const char*, 8> kKeys = {"color", "animal", "fruit", "metal",
                                              "planet", "drink", "tree", "bird"};
constexpr std::array<const char*, 8> kKeyAnswers = {"blue", "tiger", "mango", "copper",
                                                    "mars", "coffee", "oak", "eagle"};

constexpr std::array<const char*, 12> kKinds = {"disorder", "mineral", "dance", "spice",
                                                "fabric", "vessel", "ritual", "tool",
                                                "game", "sauce", "mammal", "reptile"};

constexpr const char* kConsonants = "bdfgklmnprstvz";
constexpr const char* kVowels = "aeiou";
constexpr const char* kObjectLetters = "bcdfghjklmnpqrstvwxz";

template <std::size_t N>
std::string Pick(const std::array<const char*, N>& pool, Rng& rng) {
  return pool[rng.below(N)];
}

// Distinct nouns drawn without replacement.
Tokens Nouns(Rng& rng, std::size_t n, const std::unordered_set<std::string>& avoid = {}) {
  std::vector<std::size_t> idx(kNouns.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  Tokens out;
  for (std::size_t i : idx) {
    if (out.size() == n) break;
    if (!avoid.count(kNouns[i])) out.push_back(kNouns[i]);
  }
  return out;
}

std::string Join(const Tokens& t) { return JoinTokens(t); }

class UniqueWords {
 public:
  UniqueWords() {
    // Reserve every fixed word so generated names never collide with them.
    auto reserve = [&](const auto& words) {
      for (const char* w : words) used_.insert(w);
    };
    reserve(kNouns);
    reserve(kFillers);
    reserve(kKeys);
    reserve(kKeyAnswers);
    reserve(kKinds);
    for (const char* w : {"what", "is", "near", "kind", "name", "does", "passage", "list"}) {
      used_.insert(w);
    }
  }

  // Pronounceable entity name, e.g. "zobeka".
  std::string Name(Rng& rng) {
    for (;;) {
      std::string s;
      const std::size_t syllables = 2 + rng.below(2);
      for (std::size_t i = 0; i < syllables; ++i) {
        s.push_back(kConsonants[rng.below(14)]);
        s.push_back(kVowels[rng.below(5)]);
      }
      if (used_.insert(s).second) return s;
    }
  }
  // Knowledge-only object token, e.g. "qxzte7".
  std::string Object(Rng& rng) {
    for (;;) {
      std::string s = "q";
      for (int i = 0; i < 4; ++i) s.push_back(kObjectLetters[rng.below(20)]);
      s.push_back(static_cast<char>('0' + rng.below(10)));
      if (used_.insert(s).second) return s;
    }
  }

 private:
  std::unordered_set<std::string> used_;
};

Tokens Fillers(Rng& rng, std::size_t lo, std::size_t hi) {
  Tokens out(lo + rng.below(hi - lo + 1));
  for (auto& t : out) t = Pick(kFillers, rng);
  return out;
}

void Append(Tokens& dst, const Tokens& src) { dst.insert(dst.end(), src.begin(), src.end()); }

}  // namespace

SynthTask ParseSynthTask(std::string_view name) {
  if (name == "copy-q") return SynthTask::kCopyQuestion;
  if (name == "copy-p") return SynthTask::kCopyPassage;
  if (name == "vocab-fill") return SynthTask::kVocabFill;
  if (name == "kb-lookup") return SynthTask::kKbLookup;
  if (name == "mixed") return SynthTask::kMixed;
  throw Error(ErrorKind::kConfig,
              "unknown synth task '" + std::string(name) +
                  "' (expected copy-q, copy-p, vocab-fill, kb-lookup or mixed)");
}

const char* SynthTaskName(SynthTask task) {
  switch (task) {
    case SynthTask::kCopyQuestion: return "copy-q";
    case SynthTask::kCopyPassage: return "copy-p";
    case SynthTask::kVocabFill: return "vocab-fill";
    case SynthTask::kKbLookup: return "kb-lookup";
    case SynthTask::kMixed: return "mixed";
  }
  return "?";
}

SynthDataset GenerateSynth(SynthTask task, std::size_t size, std::uint64_t seed) {
  if (size == 0) throw Error(ErrorKind::kConfig, "synth size must be at least 1");
  Rng rng(seed);
  UniqueWords unique;
  SynthDataset out;
  for (std::size_t n = 0; n < size; ++n) {
    Tokens q, p, a;
    std::string target;
    switch (task) {
      case SynthTask::kCopyQuestion: {
        a = Nouns(rng, 2 + rng.below(3));
        q = a;
        q.push_back("?");
        const std::unordered_set<std::string> avoid(a.begin(), a.end());
        p = Nouns(rng, 4 + rng.below(4), avoid);
        p.push_back(".");
        break;
      }
      case SynthTask::kCopyPassage: {
        a = Nouns(rng, 2 + rng.below(3));
        q = {"what", "does", "the", "passage", "list", "?"};
        p = a;
        p.push_back(".");
        Append(p, Fillers(rng, 2, 5));
        const std::unordered_set<std::string> avoid(a.begin(), a.end());
        Append(p, Nouns(rng, 2, avoid));
        p.push_back(".");
        break;
      }
      case SynthTask::kVocabFill: {
        const std::size_t k = rng.below(kKeys.size());
        q = {"name", "a", kKeys[k], "?"};
        p = Fillers(rng, 2, 4);
        Append(p, Nouns(rng, 3));
        p.push_back(".");
        a = {kKeyAnswers[k]};
        break;
      }
      case SynthTask::kKbLookup:
      case SynthTask::kMixed: {
        const std::string entity = unique.Name(rng);
        target = unique.Object(rng);
        const std::string near1 = unique.Name(rng);
        const std::string near2 = unique.Name(rng);
        q = {"what", "is", entity, "?"};
        out.kb.push_back({entity, "IsA", target});
        out.kb.push_back({near1, "RelatedTo", unique.Object(rng)});
        out.kb.push_back({near2, "AtLocation", unique.Object(rng)});
        a = {entity, "is", "a", target};
        if (task == SynthTask::kMixed) {
          const std::string kind = Pick(kKinds, rng);
          p = Fillers(rng, 1, 3);
          Append(p, {"kind", ":", kind, "."});
          a.push_back(kind);
        }
        Append(p, {near1, "is", "near", near2, "."});
        Append(p, Fillers(rng, 1, 3));
        p.push_back(".");
        break;
      }
    }
    out.examples.push_back({Join(q), Join(p), Join(a)});
    out.targets.push_back(target);
  }
  if (task == SynthTask::kKbLookup || task == SynthTask::kMixed) {
    // Fact order carries no signal about which fact answers the question.
    std::vector<std::size_t> order(out.kb.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<SynthTriple> shuffled;
    for (std::size_t i : order) shuffled.push_back(out.kb[i]);
    out.kb = std::move(shuffled);
  }
  return out;
}

void WriteSynth(const SynthDataset& dataset, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir + ": " + ec.message());
  const auto base = std::filesystem::path(dir);
  std::ofstream data(base / "data.jsonl");
  std::ofstream kb(base / "kb.tsv");
  if (!data || !kb) throw Error(ErrorKind::kIo, "cannot write synth files under " + dir);
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    const RawExample& e = dataset.examples[i];
    nlohmann::ordered_json j;
    j["question"] = e.question;
    j["passage"] = e.passage;
    j["answer"] = e.answer;
    if (!dataset.targets[i].empty()) j["target"] = dataset.targets[i];
    data << j.dump() << '\n';
  }
  for (const SynthTriple& t : dataset.kb) {
    kb << t.subject << '\t' << t.relation << '\t' << t.object << '\n';
  }
}

}  // namespace keag
