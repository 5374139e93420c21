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

#include "keag/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "keag/error.hpp"

namespace keag {

using ad::Var;

const char* SourceName(Source s) {
  switch (s) {
    case Source::kQuestion: return "question";
    case Source::kPassage: return "passage";
    case Source::kVocabulary: return "vocabulary";
    case Source::kKnowledge: return "knowledge";
  }
  return "?";
}

Var VocabDistribution(Var question_context, Var passage_context,
                      Var decoder_state, const VocabParams& params) {
  const Var parts[] = {question_context, passage_context, decoder_state};
  return softmax(matmul(concat(parts), params.w) + params.b);
}

Var SourceDistribution(Var question_context, Var passage_context,
                       Var decoder_state, Var input_embedding,
                       const SourceParams& params, bool knowledge_available) {
  const Var parts[] = {question_context, passage_context, decoder_state, input_embedding};
  Var logits = matmul(concat(parts), params.w) + params.b;
  if (knowledge_available) return softmax(logits);
  const Var masked[] = {softmax(slice(logits, 0, 0, 3)),
                        logits.tape->constant(ad::Tensor({1}, 0.0))};
  return concat(masked);
}

// ---------------------------------------------------------------------------

namespace {

void AddMass(std::vector<WordProb>& out,
             std::unordered_map<std::string, std::size_t>& slot,
             const std::string& token, double mass) {
  auto [it, inserted] = slot.emplace(token, out.size());
  if (inserted) out.push_back({token, 0.0, 0});
  out[it->second].prob += mass;
}

void CheckLengths(std::size_t tokens, std::size_t weights, const char* what) {
  if (tokens != weights) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(what) + ": " + std::to_string(tokens) + " tokens vs " +
                    std::to_string(weights) + " weights");
  }
}

}  // namespace

std::vector<WordProb> SourceWordDistribution(Source source, const SourceInputs& in) {
  std::vector<WordProb> out;
  std::unordered_map<std::string, std::size_t> slot;
  switch (source) {
    case Source::kQuestion:
      CheckLengths(in.question.size(), in.question_attention.size(), "question");
      for (std::size_t i = 0; i < in.question.size(); ++i) {
        AddMass(out, slot, in.question[i], in.question_attention[i]);
      }
      return out;
    case Source::kPassage:
      CheckLengths(in.passage.size(), in.passage_attention.size(), "passage");
      for (std::size_t i = 0; i < in.passage.size(); ++i) {
        AddMass(out, slot, in.passage[i], in.passage_attention[i]);
      }
      return out;
    case Source::kVocabulary:
      if (in.vocab == nullptr) throw Error(ErrorKind::kInvalidArgument, "missing vocabulary");
      CheckLengths(in.vocab->size(), in.vocab_probs.size(), "vocabulary");
      for (std::size_t i = 0; i < in.vocab_probs.size(); ++i) {
        out.push_back({in.vocab->token(i), in.vocab_probs[i], 0});
      }
      return out;
    case Source::kKnowledge: {
      CheckLengths(in.fact_objects.size(), in.fact_weights.size(), "knowledge");
      std::vector<double> best;
      for (std::size_t i = 0; i < in.fact_objects.size(); ++i) {
        const std::string& first = in.fact_objects[i]->front();
        const std::size_t before = out.size();
        AddMass(out, slot, first, in.fact_weights[i]);
        const std::size_t k = slot[first];
        if (out.size() > before) {
          out[k].fact_index = i;
          best.push_back(in.fact_weights[i]);
        } else if (in.fact_weights[i] > best[k]) {
          out[k].fact_index = i;
          best[k] = in.fact_weights[i];
        }
      }
      return out;
    }
  }
  throw Error(ErrorKind::kInvalidSource, "source must be one of 1..4");
}

double SourceWordProbability(Source source, const std::string& target,
                             const SourceInputs& in) {
  double p = 0.0;
  switch (source) {
    case Source::kQuestion:
      CheckLengths(in.question.size(), in.question_attention.size(), "question");
      for (std::size_t i = 0; i < in.question.size(); ++i) {
        if (in.question[i] == target) p += in.question_attention[i];
      }
      return p;
    case Source::kPassage:
      CheckLengths(in.passage.size(), in.passage_attention.size(), "passage");
      for (std::size_t i = 0; i < in.passage.size(); ++i) {
        if (in.passage[i] == target) p += in.passage_attention[i];
      }
      return p;
    case Source::kVocabulary:
      if (in.vocab == nullptr) throw Error(ErrorKind::kInvalidArgument, "missing vocabulary");
      return in.vocab->contains(target) ? in.vocab_probs[in.vocab->id(target)] : 0.0;
    case Source::kKnowledge:
      CheckLengths(in.fact_objects.size(), in.fact_weights.size(), "knowledge");
      for (std::size_t i = 0; i < in.fact_objects.size(); ++i) {
        if (in.fact_objects[i]->front() == target) p += in.fact_weights[i];
      }
      return p;
  }
  throw Error(ErrorKind::kInvalidSource, "source must be one of 1..4");
}

// ---------------------------------------------------------------------------

namespace {

Var AveragePool(const Tokens& tokens, const Vocabulary& vocab, Var embeddings) {
  const TokenIds ids = vocab.Encode(tokens);
  Var rows = lookup(embeddings, ids);
  const double w = 1.0 / static_cast<double>(ids.size());
  return matmul(embeddings.tape->constant(ad::Tensor({ids.size()}, w)), rows);
}

}  // namespace

Var FactFeatures(const Fact& fact, const Vocabulary& vocab, Var embeddings,
                 Var relations) {
  if (fact.relation >= relations.value().rows()) {
    throw Error(ErrorKind::kShapeMismatch,
                "relation id " + std::to_string(fact.relation) + " exceeds relation table of " +
                    std::to_string(relations.value().rows()));
  }
  const std::size_t rel[] = {fact.relation};
  const std::size_t d = relations.value().cols();
  const Var parts[] = {AveragePool(fact.subject, vocab, embeddings),
                       reshape(lookup(relations, rel), {d}),
                       AveragePool(fact.object, vocab, embeddings)};
  return concat(parts);
}

Var EmbedFact(const Fact& fact, const Vocabulary& vocab, Var embeddings,
              const FactParams& params) {
  return matmul(FactFeatures(fact, vocab, embeddings, params.relations), params.w_embed) +
         params.b_embed;
}

Var EmbedFacts(std::span<const Fact* const> facts, const Vocabulary& vocab,
               Var embeddings, const FactParams& params) {
  if (facts.empty()) throw Error(ErrorKind::kEmptyFactSet, "no facts to embed");
  std::vector<Var> rows;
  rows.reserve(facts.size());
  for (const Fact* f : facts) {
    Var feat = FactFeatures(*f, vocab, embeddings, params.relations);
    rows.push_back(reshape(feat, {1, feat.value().size()}));
  }
  return matmul(concat(rows, 0), params.w_embed) + params.b_embed;
}

Var PrepareFactKeys(Var fact_representations, const FactParams& params) {
  return matmul(fact_representations, params.w_fact) + params.bias;
}

Var FactDistribution(Var fact_keys, Var decoder_state, const FactParams& params) {
  if (fact_keys.value().rank() != 2) {
    throw Error(ErrorKind::kEmptyFactSet, "fact distribution needs a non-empty fact set");
  }
  Var hidden = tanh(add(fact_keys, matmul(decoder_state, params.w_decoder)));
  return softmax(matmul(hidden, params.g));
}

// ---------------------------------------------------------------------------

double SampleGumbel(Rng& rng) {
  const double u = std::max(rng.uniform(), kProbFloor);
  return -std::log(-std::log(u));
}

namespace {

void CheckGumbelInputs(std::span<const double> probs, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::kInvalidArgument, "temperature must be positive");
  if (probs.empty() ||
      std::all_of(probs.begin(), probs.end(), [](double p) { return p <= kProbFloor; })) {
    throw Error(ErrorKind::kDegenerateDistribution, "all probability mass at the floor");
  }
}

}  // namespace

GumbelSample GumbelSoftmaxSample(std::span<const double> probs, double tau, Rng& rng) {
  CheckGumbelInputs(probs, tau);
  GumbelSample s;
  s.tau = tau;
  s.soft.resize(probs.size());
  double mx = -INFINITY;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    s.soft[i] = (std::log(std::max(probs[i], kProbFloor)) + SampleGumbel(rng)) / tau;
    if (s.soft[i] > mx) {
      mx = s.soft[i];
      s.hard_index = i;
    }
  }
  double z = 0.0;
  for (double& v : s.soft) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : s.soft) v /= z;
  return s;
}

GumbelVar GumbelSoftmax(Var probs, double tau, Rng& rng) {
  CheckGumbelInputs(probs.value().data(), tau);
  ad::Tensor noise(probs.shape(), 0.0);
  for (double& g : noise.data()) g = SampleGumbel(rng);
  Var perturbed = log(probs, kProbFloor) + probs.tape->constant(std::move(noise));
  GumbelVar out;
  out.tau = tau;
  out.soft = softmax(scale(perturbed, 1.0 / tau));
  const auto& pv = perturbed.value().data();
  out.hard_index = static_cast<std::size_t>(
      std::max_element(pv.begin(), pv.end()) - pv.begin());
  return out;
}

double AnnealTemperature(std::size_t step, const TemperatureSchedule& schedule) {
  if (!(schedule.minimum > 0.0) || !(schedule.initial > 0.0) || schedule.rate < 0.0) {
    throw Error(ErrorKind::kInvalidSchedule,
                "temperature schedule needs initial > 0, minimum > 0, rate >= 0");
  }
  return std::max(schedule.minimum,
                  schedule.initial * std::exp(-schedule.rate * static_cast<double>(step)));
}

}  // namespace keag
