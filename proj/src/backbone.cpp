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

#include "keag/backbone.hpp"

#include <vector>

#include "keag/error.hpp"

namespace keag {

using ad::Var;

LstmState LstmStepProjected(Var x_projected, const LstmState& prev,
                            const LstmParams& params) {
  const std::size_t h = prev.h.value().size();
  Var gates = x_projected + matmul(prev.h, params.w_hidden) + params.bias;
  Var in = sigmoid(slice(gates, 0, 0, h));
  Var forget = sigmoid(slice(gates, 0, h, h));
  Var cand = tanh(slice(gates, 0, 2 * h, h));
  Var out = sigmoid(slice(gates, 0, 3 * h, h));
  Var c = forget * prev.c + in * cand;
  return {out * tanh(c), c};
}

LstmState LstmStep(Var x, const LstmState& prev, const LstmParams& params) {
  return LstmStepProjected(matmul(x, params.w_input), prev, params);
}

LstmState ZeroLstmState(ad::Tape& tape, std::size_t hidden) {
  return {tape.constant(ad::Tensor({hidden}, 0.0)),
          tape.constant(ad::Tensor({hidden}, 0.0))};
}

EncoderOutput Encode(std::span<const std::size_t> ids, Var embeddings,
                     const EncoderParams& params) {
  if (ids.empty()) throw Error(ErrorKind::kEmptySequence, "cannot encode an empty sequence");
  ad::Tape& tape = *embeddings.tape;
  const std::size_t n = ids.size();
  const std::size_t h = params.forward.w_hidden.value().rows();

  Var embedded = lookup(embeddings, ids);  // [N, d]
  Var proj_fw = matmul(embedded, params.forward.w_input);
  Var proj_bw = matmul(embedded, params.backward.w_input);

  std::vector<Var> fw(n), bw(n);
  LstmState state = ZeroLstmState(tape, h);
  for (std::size_t i = 0; i < n; ++i) {
    state = LstmStepProjected(row(proj_fw, i), state, params.forward);
    fw[i] = reshape(state.h, {1, h});
  }
  const Var last_fw = state.h;
  state = ZeroLstmState(tape, h);
  for (std::size_t i = n; i-- > 0;) {
    state = LstmStepProjected(row(proj_bw, i), state, params.backward);
    bw[i] = reshape(state.h, {1, h});
  }
  const Var first_bw = state.h;

  EncoderOutput out;
  out.length = n;
  const Var halves[] = {concat(fw, 0), concat(bw, 0)};
  out.states = concat(halves, 1);
  const Var finals[] = {last_fw, first_bw};
  out.final_state = concat(finals);
  return out;
}

AttentionKeys PrepareAttentionKeys(const EncoderOutput& encoded,
                                   const AttentionParams& params) {
  return {matmul(encoded.states, params.w_states) + params.bias, encoded.length};
}

namespace {

Var AttentionFromQuery(const AttentionKeys& keys, Var query, Var coverage,
                       const AttentionParams& params) {
  const std::size_t n = keys.length;
  const std::size_t d = params.g.value().size();
  if (coverage.value().size() != n) {
    throw Error(ErrorKind::kShapeMismatch, "coverage length differs from attention length");
  }
  Var cov_term = matmul(reshape(coverage, {n, 1}), reshape(params.w_coverage, {1, d}));
  Var hidden = tanh(add(keys.keys + cov_term, query));
  return softmax(matmul(hidden, params.g));
}

}  // namespace

Var AttendQuestion(const AttentionKeys& keys, Var decoder_state, Var coverage,
                   const AttentionParams& params) {
  return AttentionFromQuery(keys, matmul(decoder_state, params.w_decoder), coverage,
                            params);
}

Var AttendPassage(const AttentionKeys& keys, Var decoder_state,
                  Var question_context, Var coverage,
                  const AttentionParams& params) {
  if (!params.w_question) {
    throw Error(ErrorKind::kInvalidArgument, "passage attention needs w_question");
  }
  Var query = matmul(decoder_state, params.w_decoder) +
              matmul(question_context, *params.w_question);
  return AttentionFromQuery(keys, query, coverage, params);
}

Var ContextVector(Var attention, Var states) {
  if (attention.value().rank() != 1 || attention.value().size() != states.value().rows()) {
    throw Error(ErrorKind::kShapeMismatch, "attention length differs from state count");
  }
  return matmul(attention, states);
}

LstmState InitialDecoderState(const EncoderOutput& question,
                              const EncoderOutput& passage,
                              const DecoderParams& params) {
  const Var finals[] = {question.final_state, passage.final_state};
  Var mapped = matmul(concat(finals), params.w_init) + params.b_init;
  const std::size_t h = mapped.value().size() / 2;
  return {tanh(slice(mapped, 0, 0, h)), slice(mapped, 0, h, h)};
}

LstmState DecoderStep(Var prev_word_embedding, const LstmState& prev_state,
                      Var prev_question_context, Var prev_passage_context,
                      const DecoderParams& params) {
  const Var inputs[] = {prev_word_embedding, prev_question_context, prev_passage_context};
  return LstmStep(concat(inputs), prev_state, params.cell);
}

Var CoveragePenalty(Var attention, Var coverage) {
  return sum(minimum(attention, coverage));
}

}  // namespace keag
