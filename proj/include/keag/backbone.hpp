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

#ifndef KEAG_BACKBONE_HPP_
#define KEAG_BACKBONE_HPP_

#include <cstddef>
#include <optional>
#include <span>

#include "keag/autodiff.hpp"

namespace keag {

// LSTM weights. Gates are laid out as [input, forget, candidate, output]
// along the 4h axis.
struct LstmParams {
  ad::Var w_input;   // [in, 4h]
  ad::Var w_hidden;  // [h, 4h]
  ad::Var bias;      // [4h]
};

struct LstmState {
  ad::Var h;  // [h]
  ad::Var c;  // [h]
};

// One LSTM step from an already projected input (x W_input, shape [4h]).
LstmState LstmStepProjected(ad::Var x_projected, const LstmState& prev,
                            const LstmParams& params);
LstmState LstmStep(ad::Var x, const LstmState& prev, const LstmParams& params);
LstmState ZeroLstmState(ad::Tape& tape, std::size_t hidden);

struct EncoderParams {
  LstmParams forward;
  LstmParams backward;
};

struct EncoderOutput {
  ad::Var states;       // [N, 2h]: forward states, then backward states
  ad::Var final_state;  // [2h]: last forward state, first backward state
  std::size_t length = 0;
};

// Bidirectional encoder over `ids` embedded with `embeddings` ([V, d]).
// Throws EmptySequence for an empty input.
EncoderOutput Encode(std::span<const std::size_t> ids, ad::Var embeddings,
                     const EncoderParams& params);

// Additive attention with coverage:
//   logits_i = g . tanh(W e_i + U s + [V c_q] + w_cov * cov_i + b)
struct AttentionParams {
  ad::Var w_states;    // [2h, d]
  ad::Var w_decoder;   // [h, d]
  ad::Var bias;        // [d]
  ad::Var g;           // [d]
  ad::Var w_coverage;  // [d]
  std::optional<ad::Var> w_question;  // [2h, d], passage attention only
};

// Per-example precomputation of W e_i + b, shape [N, d].
struct AttentionKeys {
  ad::Var keys;
  std::size_t length = 0;
};

AttentionKeys PrepareAttentionKeys(const EncoderOutput& encoded,
                                   const AttentionParams& params);

ad::Var AttendQuestion(const AttentionKeys& keys, ad::Var decoder_state,
                       ad::Var coverage, const AttentionParams& params);
ad::Var AttendPassage(const AttentionKeys& keys, ad::Var decoder_state,
                      ad::Var question_context, ad::Var coverage,
                      const AttentionParams& params);

// sum_i a_i * e_i over the rows of `states`.
ad::Var ContextVector(ad::Var attention, ad::Var states);

struct DecoderParams {
  LstmParams cell;   // input is [word embedding, c_q, c_p]
  ad::Var w_init;    // [4h, 2h]
  ad::Var b_init;    // [2h]
};

// h0 = tanh(first half), c0 = second half of a linear map over both
// encoders' final states.
LstmState InitialDecoderState(const EncoderOutput& question,
                              const EncoderOutput& passage,
                              const DecoderParams& params);

// Input feeding: the previous step's context vectors are concatenated to the
// previous word embedding.
LstmState DecoderStep(ad::Var prev_word_embedding, const LstmState& prev_state,
                      ad::Var prev_question_context, ad::Var prev_passage_context,
                      const DecoderParams& params);

// sum_i min(a_i, cov_i)
ad::Var CoveragePenalty(ad::Var attention, ad::Var coverage);

}  // namespace keag

#endif  // KEAG_BACKBONE_HPP_
