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

#ifndef KEAG_SELECTORS_HPP_
#define KEAG_SELECTORS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keag/autodiff.hpp"
#include "keag/knowledge.hpp"
#include "keag/rng.hpp"
#include "keag/text.hpp"

namespace keag {

// Word sources for the latent selector y_t.
enum class Source : int { kQuestion = 0, kPassage = 1, kVocabulary = 2, kKnowledge = 3 };
inline constexpr std::size_t kNumSources = 4;
const char* SourceName(Source s);

// Probability floor used before taking logs of distributions.
inline constexpr double kProbFloor = 1e-12;

// ---------------------------------------------------------------------------
// Vocabulary and source distributions

struct VocabParams {
  ad::Var w;  // [4h + h, |V|]
  ad::Var b;  // [|V|]
};

// softmax(W [c_q, c_p, s] + b) over the full vocabulary.
ad::Var VocabDistribution(ad::Var question_context, ad::Var passage_context,
                          ad::Var decoder_state, const VocabParams& params);

struct SourceParams {
  ad::Var w;  // [4h + h + d_emb, 4]
  ad::Var b;  // [4]
};

// softmax(W [c_q, c_p, s, x] + b). When no knowledge is available the
// knowledge entry is exactly zero and the other three are renormalized.
ad::Var SourceDistribution(ad::Var question_context, ad::Var passage_context,
                           ad::Var decoder_state, ad::Var input_embedding,
                           const SourceParams& params, bool knowledge_available);

// ---------------------------------------------------------------------------
// Per-source word distributions

struct WordProb {
  std::string token;
  double prob = 0.0;
  // For the knowledge source: index (into the related-fact list) of the most
  // probable fact whose object starts with `token`.
  std::size_t fact_index = 0;
};

// Everything a source needs to emit a word at one step.
struct SourceInputs {
  std::span<const std::string> question;
  std::span<const std::string> passage;
  std::span<const double> question_attention;
  std::span<const double> passage_attention;
  std::span<const double> vocab_probs;
  const Vocabulary* vocab = nullptr;
  // Fact selection weights over the related facts, and the object tokens of
  // each related fact in the same order.
  std::span<const double> fact_weights;
  std::span<const Tokens* const> fact_objects;
};

// Copy sources aggregate attention over identical tokens; the vocabulary
// source is P_v; the knowledge source puts each fact's weight on the first
// token of its object. Entries appear in first-occurrence order.
std::vector<WordProb> SourceWordDistribution(Source source, const SourceInputs& in);

// Probability that `source` emits `target` (a raw token). The vocabulary
// source cannot emit out-of-vocabulary surface forms.
double SourceWordProbability(Source source, const std::string& target,
                             const SourceInputs& in);

// ---------------------------------------------------------------------------
// Facts

struct FactParams {
  ad::Var relations;  // [R, d_emb]
  ad::Var w_embed;    // [3 d_emb, d_fact]
  ad::Var b_embed;    // [d_fact]
  ad::Var w_fact;     // [d_fact, d]
  ad::Var w_decoder;  // [h, d]
  ad::Var bias;       // [d]
  ad::Var g;          // [d]
};

// [e_s, e_r, e_o] with subject and object average-pooled over their tokens.
ad::Var FactFeatures(const Fact& fact, const Vocabulary& vocab, ad::Var embeddings,
                     ad::Var relations);

// f = W_e [e_s, e_r, e_o] + b_e, shape [d_fact].
ad::Var EmbedFact(const Fact& fact, const Vocabulary& vocab, ad::Var embeddings,
                  const FactParams& params);

// All related facts at once: [N_f, d_fact].
ad::Var EmbedFacts(std::span<const Fact* const> facts, const Vocabulary& vocab,
                   ad::Var embeddings, const FactParams& params);

// Precomputed W_f f_i + b_f, [N_f, d].
ad::Var PrepareFactKeys(ad::Var fact_representations, const FactParams& params);

// softmax_i(g . tanh(W_f f_i + U_f s + b_f)). Throws EmptyFactSet.
ad::Var FactDistribution(ad::Var fact_keys, ad::Var decoder_state,
                         const FactParams& params);

// ---------------------------------------------------------------------------
// Gumbel-Softmax

struct GumbelSample {
  std::vector<double> soft;
  std::size_t hard_index = 0;
  double tau = 1.0;
};

struct GumbelVar {
  ad::Var soft;
  std::size_t hard_index = 0;
  double tau = 1.0;
};

// g = -log(-log(u)), u uniform on (0, 1) floored at 1e-12.
double SampleGumbel(Rng& rng);

// softmax((log(max(pi, 1e-12)) + g) / tau). Throws DegenerateDistribution
// when every probability sits at or below the floor.
GumbelSample GumbelSoftmaxSample(std::span<const double> probs, double tau, Rng& rng);
GumbelVar GumbelSoftmax(ad::Var probs, double tau, Rng& rng);

struct TemperatureSchedule {
  double initial = 1.0;
  double rate = 1e-4;
  double minimum = 0.1;
};

// max(minimum, initial * exp(-rate * step)).
double AnnealTemperature(std::size_t step, const TemperatureSchedule& schedule);

}  // namespace keag

#endif  // KEAG_SELECTORS_HPP_
