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

// Tiny model and example builders shared by trainer, generator and
// acceptance tests.

#ifndef KEAG_TESTS_TOY_HPP_
#define KEAG_TESTS_TOY_HPP_

#include <string>
#include <vector>

#include "keag/model.hpp"
#include "keag/text.hpp"
#include "keag/trainer.hpp"

namespace keag::oracle {

inline Vocabulary ToyVocab() {
  return Vocabulary::FromTokens({"<pad>", "<unk>", "<s>", "</s>", "w", "x", "y", "z", "the", "is"});
}

inline ModelConfig ToyConfig(std::size_t vocab_size) {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.emb_dim = 3;
  c.hidden = 3;
  c.fact_dim = 4;
  c.num_relations = 2;
  c.init_range = 0.5;
  return c;
}

// Builds an item directly from token lists (no tokenizer), so tests can use
// arbitrary surface forms.
inline TrainingItem MakeItem(const Vocabulary& vocab, Tokens question, Tokens passage,
                             Tokens answer, std::vector<Fact> facts = {}) {
  TrainingItem item;
  Example& ex = item.example;
  ex.question = std::move(question);
  ex.passage = std::move(passage);
  ex.answer = std::move(answer);
  ex.question_ids = vocab.Encode(ex.question);
  ex.passage_ids = vocab.Encode(ex.passage);
  ex.answer_ids = vocab.Encode(ex.answer);
  ex.answer_ids.push_back(Vocabulary::kEos);
  item.facts = std::move(facts);
  return item;
}

inline void ZeroParameters(KeagModel& model) {
  for (std::size_t i = 0; i < model.params().size(); ++i) model.params().value(i).fill(0.0);
}

}  // namespace keag::oracle

#endif  // KEAG_TESTS_TOY_HPP_
