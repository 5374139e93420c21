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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "keag/error.hpp"
#include "keag/synth.hpp"
#include "keag/text.hpp"

using namespace keag;

namespace {

bool Contains(const Tokens& tokens, const std::string& word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

}  // namespace

TEST_CASE("task names") {
  for (auto task : {SynthTask::kCopyQuestion, SynthTask::kCopyPassage, SynthTask::kVocabFill,
                    SynthTask::kKbLookup, SynthTask::kMixed}) {
    CHECK(ParseSynthTask(SynthTaskName(task)) == task);
  }
  CHECK_THROWS_AS(ParseSynthTask("copy"), Error);
  CHECK_THROWS_AS(GenerateSynth(SynthTask::kCopyQuestion, 0, 1), Error);
}

TEST_CASE("sizes and determinism") {
  CHECK(GenerateSynth(SynthTask::kCopyQuestion, 1, 9).examples.size() == 1);
  const SynthDataset a = GenerateSynth(SynthTask::kMixed, 50, 3);
  const SynthDataset b = GenerateSynth(SynthTask::kMixed, 50, 3);
  REQUIRE(a.examples.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a.examples[i].answer == b.examples[i].answer);
    CHECK(a.examples[i].passage == b.examples[i].passage);
  }
  CHECK(GenerateSynth(SynthTask::kMixed, 50, 4).examples[0].question != a.examples[0].question);
}

TEST_CASE("copy answers come from the named text") {
  for (const RawExample& ex : GenerateSynth(SynthTask::kCopyQuestion, 100, 2).examples) {
    CHECK(ex.question.find(ex.answer) == 0);
    for (const std::string& w : Tokenize(ex.answer)) CHECK_FALSE(Contains(Tokenize(ex.passage), w));
  }
  for (const RawExample& ex : GenerateSynth(SynthTask::kCopyPassage, 100, 2).examples) {
    CHECK(ex.passage.find(ex.answer) == 0);
    for (const std::string& w : Tokenize(ex.answer)) CHECK_FALSE(Contains(Tokenize(ex.question), w));
  }
}

TEST_CASE("knowledge targets appear only in the knowledge base") {
  for (SynthTask task : {SynthTask::kKbLookup, SynthTask::kMixed}) {
    const SynthDataset d = GenerateSynth(task, 300, 5);
    std::vector<Tokens> corpus;
    for (const RawExample& ex : d.examples) {
      corpus.push_back(Tokenize(ex.question));
      corpus.push_back(Tokenize(ex.passage));
      corpus.push_back(Tokenize(ex.answer));
    }
    const Vocabulary vocab = Vocabulary::Build(corpus, 100000, 2);
    for (std::size_t i = 0; i < d.examples.size(); ++i) {
      const std::string& target = d.targets[i];
      CAPTURE(target);
      CHECK(Contains(Tokenize(d.examples[i].answer), target));
      CHECK_FALSE(Contains(Tokenize(d.examples[i].question), target));
      CHECK_FALSE(Contains(Tokenize(d.examples[i].passage), target));
      CHECK_FALSE(vocab.contains(target));
      int in_kb = 0;
      for (const SynthTriple& t : d.kb) in_kb += t.object == target;
      CHECK(in_kb == 1);
    }
  }
}

TEST_CASE("mixed answers draw on all four sources") {
  const SynthDataset d = GenerateSynth(SynthTask::kMixed, 20, 8);
  for (std::size_t i = 0; i < d.examples.size(); ++i) {
    const Tokens q = Tokenize(d.examples[i].question);
    const Tokens p = Tokenize(d.examples[i].passage);
    const Tokens a = Tokenize(d.examples[i].answer);
    REQUIRE(a.size() == 5);
    CHECK(Contains(q, a[0]));                                  // question word
    CHECK((a[1] == "is" && a[2] == "a"));                      // fixed vocabulary words
    CHECK(a[3] == d.targets[i]);                               // knowledge object
    CHECK(Contains(p, a[4]));                                  // passage word
    CHECK_FALSE(Contains(q, a[4]));
  }
}

TEST_CASE("files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "keag_synth_test";
  std::filesystem::remove_all(dir);
  WriteSynth(GenerateSynth(SynthTask::kKbLookup, 4, 1), dir.string());
  CHECK(LoadDataset((dir / "data.jsonl").string()).size() == 4);
  std::ifstream kb(dir / "kb.tsv");
  int lines = 0;
  for (std::string line; std::getline(kb, line);) ++lines;
  CHECK(lines == 12);
  std::filesystem::remove_all(dir);
}
