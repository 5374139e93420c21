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

#ifndef KEAG_MODEL_HPP_
#define KEAG_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "keag/backbone.hpp"
#include "keag/knowledge.hpp"
#include "keag/params.hpp"
#include "keag/selectors.hpp"
#include "keag/text.hpp"

namespace keag {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t emb_dim = 300;
  std::size_t hidden = 256;
  std::size_t fact_dim = 500;
  std::size_t num_relations = 32;
  double init_range = 0.08;
  bool use_knowledge = true;
};

// Tape-bound views of every model parameter.
struct ModelVars {
  ad::Var embeddings;
  EncoderParams question_encoder;
  EncoderParams passage_encoder;
  DecoderParams decoder;
  AttentionParams question_attention;
  AttentionParams passage_attention;
  VocabParams vocab;
  SourceParams source;
  FactParams fact;
  std::vector<ad::Var> all;  // parameter registration order
};

// Recurrent state carried from one decoding step to the next.
struct DecoderCarry {
  LstmState state;
  ad::Var question_context;
  ad::Var passage_context;
  ad::Var question_coverage;
  ad::Var passage_coverage;
};

// Per-example quantities that do not depend on the decoding step.
struct ExampleContext {
  EncoderOutput question;
  EncoderOutput passage;
  AttentionKeys question_keys;
  AttentionKeys passage_keys;
  std::optional<ad::Var> fact_keys;
  std::size_t num_facts = 0;
  bool knowledge_available = false;
  DecoderCarry initial;
};

struct StepResult {
  DecoderCarry next;
  ad::Var input_embedding;
  ad::Var question_attention;
  ad::Var passage_attention;
  ad::Var vocab_probs;
  ad::Var source_probs;
  std::optional<ad::Var> fact_probs;
  ad::Var coverage_penalty;  // both attentions
};

class KeagModel {
 public:
  // Uniform [-init_range, init_range] initialization from `seed`. When
  // `embeddings` is given it replaces the random embedding matrix.
  KeagModel(const ModelConfig& config, std::uint64_t seed,
            const EmbeddingTable* embeddings = nullptr);
  // Adopts an existing parameter set (checkpoint load); names and shapes
  // are validated against `config`.
  KeagModel(const ModelConfig& config, ParameterStore params);

  const ModelConfig& config() const { return config_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  ModelVars Bind(ad::Tape& tape, bool trainable) const;
  ModelVars View(std::span<const ad::Var> vars) const;

  ExampleContext Prepare(const ModelVars& vars, const Example& example,
                         std::span<const Fact* const> facts,
                         const Vocabulary& vocab) const;

  // One decoder step fed with the embedding of `input_id`.
  StepResult Step(const ModelVars& vars, const ExampleContext& context,
                  const DecoderCarry& carry, std::size_t input_id) const;

 private:
  static ParameterStore Layout(const ModelConfig& config, std::uint64_t seed);

  ModelConfig config_;
  ParameterStore params_;
};

}  // namespace keag

#endif  // KEAG_MODEL_HPP_
