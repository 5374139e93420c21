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

#include "keag/model.hpp"

#include <string>

#include "keag/error.hpp"

namespace keag {

using ad::Var;

ParameterStore KeagModel::Layout(const ModelConfig& c, std::uint64_t seed) {
  if (c.vocab_size < Vocabulary::kNumSpecials || c.emb_dim == 0 || c.hidden == 0 ||
      c.fact_dim == 0 || c.num_relations == 0) {
    throw Error(ErrorKind::kConfig, "model dimensions must be positive");
  }
  Rng rng(seed);
  ParameterStore p;
  const double r = c.init_range;
  const std::size_t e = c.emb_dim, h = c.hidden, v = c.vocab_size;
  p.AddUniform("embeddings", {v, e}, r, rng);
  for (const char* enc : {"enc_q", "enc_p"}) {
    for (const char* dir : {"fw", "bw"}) {
      const std::string base = std::string(enc) + "." + dir;
      p.AddUniform(base + ".w_input", {e, 4 * h}, r, rng);
      p.AddUniform(base + ".w_hidden", {h, 4 * h}, r, rng);
      p.AddUniform(base + ".bias", {4 * h}, r, rng);
    }
  }
  p.AddUniform("dec.w_input", {e + 4 * h, 4 * h}, r, rng);
  p.AddUniform("dec.w_hidden", {h, 4 * h}, r, rng);
  p.AddUniform("dec.bias", {4 * h}, r, rng);
  p.AddUniform("dec.w_init", {4 * h, 2 * h}, r, rng);
  p.AddUniform("dec.b_init", {2 * h}, r, rng);
  for (const char* att : {"att_q", "att_p"}) {
    const std::string base = att;
    p.AddUniform(base + ".w_states", {2 * h, h}, r, rng);
    p.AddUniform(base + ".w_decoder", {h, h}, r, rng);
    p.AddUniform(base + ".bias", {h}, r, rng);
    p.AddUniform(base + ".g", {h}, r, rng);
    p.AddUniform(base + ".w_coverage", {h}, r, rng);
  }
  p.AddUniform("att_p.w_question", {2 * h, h}, r, rng);
  p.AddUniform("vocab.w", {5 * h, v}, r, rng);
  p.AddUniform("vocab.b", {v}, r, rng);
  p.AddUniform("source.w", {5 * h + e, kNumSources}, r, rng);
  p.AddUniform("source.b", {kNumSources}, r, rng);
  p.AddUniform("fact.relations", {c.num_relations, e}, r, rng);
  p.AddUniform("fact.w_embed", {3 * e, c.fact_dim}, r, rng);
  p.AddUniform("fact.b_embed", {c.fact_dim}, r, rng);
  p.AddUniform("fact.w_fact", {c.fact_dim, h}, r, rng);
  p.AddUniform("fact.w_decoder", {h, h}, r, rng);
  p.AddUniform("fact.bias", {h}, r, rng);
  p.AddUniform("fact.g", {h}, r, rng);
  return p;
}

KeagModel::KeagModel(const ModelConfig& config, std::uint64_t seed,
                     const EmbeddingTable* embeddings)
    : config_(config), params_(Layout(config, seed)) {
  if (embeddings != nullptr) {
    ad::Tensor& table = params_.value("embeddings");
    if (embeddings->matrix.shape() != table.shape()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "embedding table " + ad::ShapeString(embeddings->matrix.shape()) +
                      " does not match model " + ad::ShapeString(table.shape()));
    }
    table = embeddings->matrix;
  }
}

KeagModel::KeagModel(const ModelConfig& config, ParameterStore params)
    : config_(config) {
  const ParameterStore expected = Layout(config, 0);
  if (expected.size() != params.size()) {
    throw Error(ErrorKind::kVersionMismatch,
                "parameter count " + std::to_string(params.size()) + " does not match model (" +
                    std::to_string(expected.size()) + ")");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (!params.contains(expected.name(i)) ||
        params.value(expected.name(i)).shape() != expected.value(i).shape()) {
      throw Error(ErrorKind::kVersionMismatch,
                  "parameter " + expected.name(i) + " missing or mis-shaped");
    }
  }
  // Re-register in canonical order.
  for (std::size_t i = 0; i < expected.size(); ++i) {
    params_.Add(expected.name(i), params.value(expected.name(i)));
  }
}

ModelVars KeagModel::Bind(ad::Tape& tape, bool trainable) const {
  const std::vector<Var> vars = params_.Bind(tape, trainable);
  return View(vars);
}

ModelVars KeagModel::View(std::span<const Var> vars) const {
  if (vars.size() != params_.size()) {
    throw Error(ErrorKind::kShapeMismatch, "variable count does not match parameters");
  }
  auto at = [&](const char* name) { return vars[params_.index(name)]; };
  auto lstm = [&](const std::string& base) {
    return LstmParams{at((base + ".w_input").c_str()), at((base + ".w_hidden").c_str()),
                      at((base + ".bias").c_str())};
  };
  auto attention = [&](const std::string& base) {
    AttentionParams a;
    a.w_states = at((base + ".w_states").c_str());
    a.w_decoder = at((base + ".w_decoder").c_str());
    a.bias = at((base + ".bias").c_str());
    a.g = at((base + ".g").c_str());
    a.w_coverage = at((base + ".w_coverage").c_str());
    return a;
  };
  ModelVars m;
  m.all.assign(vars.begin(), vars.end());
  m.embeddings = at("embeddings");
  m.question_encoder = {lstm("enc_q.fw"), lstm("enc_q.bw")};
  m.passage_encoder = {lstm("enc_p.fw"), lstm("enc_p.bw")};
  m.decoder = {lstm("dec"), at("dec.w_init"), at("dec.b_init")};
  m.question_attention = attention("att_q");
  m.passage_attention = attention("att_p");
  m.passage_attention.w_question = at("att_p.w_question");
  m.vocab = {at("vocab.w"), at("vocab.b")};
  m.source = {at("source.w"), at("source.b")};
  m.fact = {at("fact.relations"), at("fact.w_embed"), at("fact.b_embed"),
            at("fact.w_fact"),    at("fact.w_decoder"), at("fact.bias"),
            at("fact.g")};
  return m;
}

ExampleContext KeagModel::Prepare(const ModelVars& vars, const Example& example,
                                  std::span<const Fact* const> facts,
                                  const Vocabulary& vocab) const {
  ad::Tape& tape = *vars.embeddings.tape;
  ExampleContext ctx;
  ctx.question = Encode(example.question_ids, vars.embeddings, vars.question_encoder);
  ctx.passage = Encode(example.passage_ids, vars.embeddings, vars.passage_encoder);
  ctx.question_keys = PrepareAttentionKeys(ctx.question, vars.question_attention);
  ctx.passage_keys = PrepareAttentionKeys(ctx.passage, vars.passage_attention);
  ctx.knowledge_available = config_.use_knowledge && !facts.empty();
  if (ctx.knowledge_available) {
    ctx.num_facts = facts.size();
    ctx.fact_keys = PrepareFactKeys(EmbedFacts(facts, vocab, vars.embeddings, vars.fact),
                                    vars.fact);
  }
  const std::size_t h = config_.hidden;
  ctx.initial.state = InitialDecoderState(ctx.question, ctx.passage, vars.decoder);
  ctx.initial.question_context = tape.constant(ad::Tensor({2 * h}, 0.0));
  ctx.initial.passage_context = tape.constant(ad::Tensor({2 * h}, 0.0));
  ctx.initial.question_coverage = tape.constant(ad::Tensor({ctx.question.length}, 0.0));
  ctx.initial.passage_coverage = tape.constant(ad::Tensor({ctx.passage.length}, 0.0));
  return ctx;
}

StepResult KeagModel::Step(const ModelVars& vars, const ExampleContext& ctx,
                           const DecoderCarry& carry, std::size_t input_id) const {
  StepResult r;
  const std::size_t ids[] = {input_id};
  r.input_embedding = reshape(lookup(vars.embeddings, ids), {config_.emb_dim});

  LstmState state = DecoderStep(r.input_embedding, carry.state, carry.question_context,
                                carry.passage_context, vars.decoder);
  // The passage attention conditions on the same step's question context.
  r.question_attention = AttendQuestion(ctx.question_keys, state.h,
                                        carry.question_coverage, vars.question_attention);
  Var c_q = ContextVector(r.question_attention, ctx.question.states);
  r.passage_attention = AttendPassage(ctx.passage_keys, state.h, c_q,
                                      carry.passage_coverage, vars.passage_attention);
  Var c_p = ContextVector(r.passage_attention, ctx.passage.states);

  r.coverage_penalty = CoveragePenalty(r.question_attention, carry.question_coverage) +
                       CoveragePenalty(r.passage_attention, carry.passage_coverage);
  r.vocab_probs = VocabDistribution(c_q, c_p, state.h, vars.vocab);
  r.source_probs = SourceDistribution(c_q, c_p, state.h, r.input_embedding, vars.source,
                                      ctx.knowledge_available);
  if (ctx.knowledge_available) {
    r.fact_probs = FactDistribution(*ctx.fact_keys, state.h, vars.fact);
  }

  r.next.state = state;
  r.next.question_context = c_q;
  r.next.passage_context = c_p;
  r.next.question_coverage = carry.question_coverage + r.question_attention;
  r.next.passage_coverage = carry.passage_coverage + r.passage_attention;
  return r;
}

}  // namespace keag
