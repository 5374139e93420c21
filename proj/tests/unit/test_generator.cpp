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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "keag/error.hpp"
#include "keag/generator.hpp"
#include "keag/trainer.hpp"
#include "toy.hpp"

using namespace keag;
namespace o = keag::oracle;

namespace {

const std::vector<Fact> kFacts = {Fact{{"x"}, 0, {"w", "thing", "y"}, 0},
                                  Fact{{"y"}, 1, {"z"}, 1}};

TrainingItem Item(const Vocabulary& vocab) {
  return o::MakeItem(vocab, {"w", "x", "the"}, {"y", "is", "w", "z"}, {"w"}, kFacts);
}

// Element `index` of the named parameter.
double& At(KeagModel& model, const char* name, std::size_t index) {
  return model.params().value(name).data()[index];
}

std::vector<std::vector<std::string>> Rows(const std::string& table) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(table);
  for (std::string line; std::getline(in, line);) {
    std::istringstream cells(line);
    rows.emplace_back();
    for (std::string c; cells >> c;) rows.back().push_back(c);
  }
  return rows;
}

}  // namespace

TEST_CASE("stored score equals the score recomputed from the trace") {
  const Vocabulary vocab = o::ToyVocab();
  const TrainingItem item = Item(vocab);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    KeagModel model(o::ToyConfig(vocab.size()), seed);
    for (std::size_t beam : {1u, 4u}) {
      GenerationConfig cfg;
      cfg.beam = beam;
      cfg.max_length = 12;
      const GenerationResult r = Generate(model, vocab, item.example, kFacts, cfg);
      CHECK(std::abs(TraceScore(r.trace) - r.score) <= 1e-9);
      CHECK(r.normalized_score == doctest::Approx(r.score / r.trace.size()).epsilon(1e-12));
    }
  }
}

TEST_CASE("wider beam never loses to greedy decoding") {
  const Vocabulary vocab = o::ToyVocab();
  const TrainingItem item = Item(vocab);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    KeagModel model(o::ToyConfig(vocab.size()), seed);
    GenerationConfig greedy;
    greedy.beam = 1;
    greedy.max_length = 10;
    GenerationConfig wide = greedy;
    wide.beam = 4;
    const double g = Generate(model, vocab, item.example, kFacts, greedy).normalized_score;
    const double b = Generate(model, vocab, item.example, kFacts, wide).normalized_score;
    CHECK(b >= g);
  }
}

TEST_CASE("decoding is deterministic") {
  const Vocabulary vocab = o::ToyVocab();
  const TrainingItem item = Item(vocab);
  KeagModel model(o::ToyConfig(vocab.size()), 5);
  GenerationConfig cfg;
  const GenerationResult a = Generate(model, vocab, item.example, kFacts, cfg);
  const GenerationResult b = Generate(model, vocab, item.example, kFacts, cfg);
  CHECK(a.answer == b.answer);
  CHECK(a.score == b.score);
  CHECK(RenderTrace(a.trace) == RenderTrace(b.trace));
}

TEST_CASE("answers stop at the length limit") {
  const Vocabulary vocab = o::ToyVocab();
  const TrainingItem item = o::MakeItem(vocab, {"w", "x"}, {"y", "z"}, {"w"});
  KeagModel model(o::ToyConfig(vocab.size()), 3);
  o::ZeroParameters(model);
  At(model, "vocab.b", Vocabulary::kEos) = -50.0;  // never worth ending
  At(model, "source.b", 2) = 5.0;                   // always the vocabulary

  const GenerationResult full = Generate(model, vocab, item.example, {}, GenerationConfig{});
  CHECK(full.answer.size() == 120);
  CHECK(full.trace.size() == 120);

  GenerationConfig shorter;
  shorter.beam = 2;
  shorter.max_length = 7;
  CHECK(Generate(model, vocab, item.example, {}, shorter).answer.size() == 7);
}

TEST_CASE("a selected fact object is emitted whole before the next choice") {
  const Vocabulary vocab = o::ToyVocab();
  const TrainingItem item = Item(vocab);
  KeagModel model(o::ToyConfig(vocab.size()), 11);
  o::ZeroParameters(model);
  At(model, "source.b", 3) = 5.0;  // knowledge dominates
  // Fact scores are zero, so the first fact wins the tie and its first
  // object word is chosen.
  GenerationConfig cfg;
  cfg.beam = 1;
  cfg.max_length = 5;
  const GenerationResult r = Generate(model, vocab, item.example, kFacts, cfg);
  REQUIRE(r.trace.size() >= 3);
  CHECK(r.answer[0] == "w");
  CHECK(r.answer[1] == "thing");
  CHECK(r.answer[2] == "y");
  CHECK_FALSE(r.trace[0].continuation);
  CHECK(r.trace[0].source == Source::kKnowledge);
  CHECK(r.trace[0].fact_id == 0u);
  for (int i = 1; i < 3; ++i) {
    CHECK(r.trace[i].continuation);
    CHECK(r.trace[i].source == Source::kKnowledge);
    CHECK(r.trace[i].source_probs == r.trace[0].source_probs);
    CHECK(r.trace[i].word_prob == 1.0);
  }
}

TEST_CASE("generation input errors") {
  const Vocabulary vocab = o::ToyVocab();
  KeagModel model(o::ToyConfig(vocab.size()), 1);
  TrainingItem empty = o::MakeItem(vocab, {}, {"y"}, {"w"});
  try {
    Generate(model, vocab, empty.example, {}, GenerationConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyQuestion);
  }
  GenerationConfig zero;
  zero.beam = 0;
  CHECK_THROWS_AS(Generate(model, vocab, Item(vocab).example, {}, zero), Error);
  // No facts is not an error: the knowledge source is simply unavailable.
  const GenerationResult r = Generate(model, vocab, Item(vocab).example, {}, GenerationConfig{});
  for (const TraceRecord& rec : r.trace) CHECK(rec.source_probs[3] == 0.0);
}

TEST_CASE("trace table") {
  TraceRecord a;
  a.token = "psychopathy";
  a.source_probs = {0.6168, 0.2, 0.1332, 0.05};
  a.source = Source::kQuestion;
  TraceRecord b;
  b.token = "is";
  b.source_probs = {0.01, 0.02, 0.95, 0.02};
  const auto rows = Rows(RenderTrace({a, b}));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"psychopathy", "is"});
  CHECK(rows[1] == std::vector<std::string>{"question", "61.68", "1.00"});
  CHECK(rows[5] == std::vector<std::string>{"chosen", "question", "vocabulary"});
  for (std::size_t col = 1; col <= 2; ++col) {
    double total = 0.0;
    for (std::size_t row = 1; row <= 4; ++row) total += std::stod(rows[row][col]);
    CHECK(total == doctest::Approx(100.0).epsilon(1e-3));
  }

  SUBCASE("all-vocabulary answer") {
    SourceTrace trace(3, b);
    const auto r = Rows(RenderTrace(trace));
    CHECK(r[5] == std::vector<std::string>{"chosen", "vocabulary", "vocabulary", "vocabulary"});
  }
  SUBCASE("columns line up") {
    std::istringstream in(RenderTrace({a, b}));
    std::vector<std::size_t> widths;
    for (std::string line; std::getline(in, line);) widths.push_back(line.size());
    for (std::size_t w : widths) CHECK(w == widths.front());
  }
}

TEST_CASE("greedy decoding reproduces the question after copy training") {
  const Vocabulary vocab = o::ToyVocab();
  std::vector<TrainingItem> data;
  const std::vector<Tokens> questions = {{"w", "x"}, {"y", "z", "w"}, {"the", "y"},
                                         {"x", "is", "z"}, {"z", "w"}, {"is", "x", "y"}};
  for (const Tokens& q : questions) data.push_back(o::MakeItem(vocab, q, {"the", "is"}, q));

  ModelConfig mc = o::ToyConfig(vocab.size());
  mc.emb_dim = 8;
  mc.hidden = 12;
  mc.init_range = 0.1;
  KeagModel model(mc, 4);
  TrainingConfig tc;
  tc.batch_size = 6;
  tc.max_steps = 400;
  tc.adam.lr = 0.02;
  tc.seed = 4;
  Trainer trainer(model, vocab, tc);
  trainer.Train(data, nullptr);

  GenerationConfig cfg;
  cfg.beam = 1;
  cfg.max_length = 10;
  for (const TrainingItem& item : data) {
    CHECK(Generate(model, vocab, item.example, {}, cfg).answer == item.example.question);
  }
}
