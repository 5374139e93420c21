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

#include "keag/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "keag/error.hpp"

namespace keag {

using ad::Tensor;
using ad::Var;

std::vector<const Fact*> TrainingItem::fact_pointers() const {
  std::vector<const Fact*> out;
  out.reserve(facts.size());
  for (const Fact& f : facts) out.push_back(&f);
  return out;
}

std::vector<TrainingItem> PrepareItems(std::span<const RawExample> raw, const Vocabulary& vocab,
                                       const KnowledgeBase& kb, std::size_t max_facts,
                                       const TextLimits& limits) {
  std::vector<TrainingItem> items;
  items.reserve(raw.size());
  for (const RawExample& r : raw) {
    TrainingItem item;
    item.example = EncodeExample(r.question, r.passage, r.answer, vocab, limits);
    if (kb.size() > 0) {
      for (const ScoredFact& s :
           ExtractRelatedFacts(kb, item.example.question, item.example.passage, max_facts)) {
        item.facts.push_back(kb.fact(s.fact_id));
      }
    }
    items.push_back(std::move(item));
  }
  return items;
}

// ---------------------------------------------------------------------------

double ElboResult::marginal_log_likelihood() const {
  double total = 0.0;
  for (const StepDiagnostics& s : steps) {
    double p = 0.0;
    for (std::size_t y = 0; y < kNumSources; ++y) p += s.source_probs[y] * s.word_probs[y];
    total += std::log(p);
  }
  return total;
}

double ElboResult::exact_lower_bound() const {
  double total = 0.0;
  for (const StepDiagnostics& s : steps) {
    for (std::size_t y = 0; y < kNumSources; ++y) {
      if (s.source_probs[y] > 0.0) total += s.source_probs[y] * std::log(s.word_probs[y]);
    }
  }
  return total;
}

namespace {

// Sum of the entries of `weights` at `positions`, or a constant zero.
Var GatherSum(Var weights, const std::vector<std::size_t>& positions) {
  if (positions.empty()) return weights.tape->constant(Tensor({1}, 0.0));
  return reshape(sum(lookup(weights, positions)), {1});
}

std::vector<std::size_t> Positions(std::span<const std::string> tokens, const std::string& target) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == target) out.push_back(i);
  }
  return out;
}

}  // namespace

ElboResult ElboLoss(const KeagModel& model, const ModelVars& vars, const TrainingItem& item,
                    const Vocabulary& vocab, double tau, Rng& rng, const LossConfig& config) {
  if (config.mc_samples == 0) {
    throw Error(ErrorKind::kConfig, "mc_samples must be at least 1");
  }
  const Example& ex = item.example;
  if (ex.answer_ids.size() != ex.answer.size() + 1) {
    throw Error(ErrorKind::kLengthMismatch, "answer ids must be the answer tokens plus EOS");
  }
  ad::Tape& tape = *vars.embeddings.tape;
  const std::vector<const Fact*> facts = item.fact_pointers();
  ExampleContext ctx = model.Prepare(vars, ex, facts, vocab);

  // Facts grouped by the first token of their object, for the knowledge term.
  std::vector<std::string> first_tokens;
  for (const Fact* f : facts) first_tokens.push_back(f->object.front());

  const bool gumbel = config.estimator == Estimator::kGumbel;
  const double inv_samples = 1.0 / static_cast<double>(config.mc_samples);
  ElboResult out;
  std::vector<Var> step_terms;
  std::vector<Var> coverage_terms;
  DecoderCarry carry = ctx.initial;
  std::size_t input = Vocabulary::kBos;

  for (std::size_t t = 0; t < ex.answer_ids.size(); ++t) {
    const std::string& target =
        t < ex.answer.size() ? ex.answer[t] : vocab.token(Vocabulary::kEos);
    StepResult r = model.Step(vars, ctx, carry, input);

    Var p_question = GatherSum(r.question_attention, Positions(ex.question, target));
    Var p_passage = GatherSum(r.passage_attention, Positions(ex.passage, target));
    Var p_vocab = vocab.contains(target)
                      ? reshape(lookup(r.vocab_probs, std::vector{vocab.id(target)}), {1})
                      : tape.constant(Tensor({1}, 0.0));
    const std::vector<std::size_t> fact_hits = Positions(first_tokens, target);

    StepDiagnostics diag;
    for (std::size_t y = 0; y < kNumSources; ++y) diag.source_probs[y] = r.source_probs.value()[y];

    auto log_likelihoods = [&](Var fact_weights) {
      Var p_knowledge = ctx.knowledge_available ? GatherSum(fact_weights, fact_hits)
                                                : tape.constant(Tensor({1}, 0.0));
      const Var parts[] = {p_question, p_passage, p_vocab, p_knowledge};
      return log(concat(parts), kProbFloor);
    };
    auto record_word_probs = [&](Var logs) {
      for (std::size_t y = 0; y < kNumSources; ++y) diag.word_probs[y] = std::exp(logs.value()[y]);
    };

    Var term;
    if (gumbel) {
      for (std::size_t s = 0; s < config.mc_samples; ++s) {
        Var fact_weights = ctx.knowledge_available
                               ? GumbelSoftmax(*r.fact_probs, tau, rng).soft
                               : Var{};
        Var logs = log_likelihoods(fact_weights);
        GumbelVar y = GumbelSoftmax(r.source_probs, tau, rng);
        Var sample = sum(y.soft * logs);
        term = s == 0 ? sample : term + sample;
        if (s == 0) {
          record_word_probs(logs);
          diag.selected = y.hard_index;
        }
      }
      if (config.mc_samples > 1) term = scale(term, inv_samples);
    } else {
      Var logs = log_likelihoods(ctx.knowledge_available ? *r.fact_probs : Var{});
      record_word_probs(logs);
      term = sum(r.source_probs * logs);
      const auto& p = r.source_probs.value().data();
      diag.selected = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    }

    step_terms.push_back(term);
    coverage_terms.push_back(r.coverage_penalty);
    out.objective += term.scalar();
    out.coverage += r.coverage_penalty.scalar();
    ++out.source_counts[diag.selected];
    out.steps.push_back(diag);

    carry = r.next;
    input = ex.answer_ids[t];
  }

  auto total = [](const std::vector<Var>& terms) {
    Var acc = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) acc = acc + terms[i];
    return acc;
  };
  Var loss = scale(total(step_terms), -1.0);
  if (config.coverage_weight != 0.0) {
    loss = loss + scale(total(coverage_terms), config.coverage_weight);
  }
  if (!std::isfinite(loss.scalar())) {
    throw Error(ErrorKind::kNonFiniteLoss, "loss is not finite");
  }
  out.loss = loss;
  return out;
}

// ---------------------------------------------------------------------------

void Adam::Update(ParameterStore& params, std::span<const Tensor> grads) {
  if (grads.size() != params.size()) {
    throw Error(ErrorKind::kShapeMismatch, "gradient count differs from parameter count");
  }
  if (m_.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.emplace_back(params.value(i).shape(), 0.0);
      v_.emplace_back(params.value(i).shape(), 0.0);
    }
  }
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params.value(i).data();
    auto g = grads[i].data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      p[k] -= config_.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.eps);
    }
  }
}

double ClipGlobalNorm(std::span<Tensor> grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor& g : grads)
    for (double v : g.data()) sq += v * v;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (Tensor& g : grads)
      for (double& v : g.data()) v *= f;
  }
  return norm;
}

namespace {

constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

void ValidateTraining(const TrainingConfig& c) {
  if (c.batch_size == 0) throw Error(ErrorKind::kConfig, "batch_size must be at least 1");
  if (!(c.adam.lr >= 0.0)) throw Error(ErrorKind::kConfig, "lr must be non-negative");
  if (c.loss.mc_samples == 0) throw Error(ErrorKind::kConfig, "mc_samples must be at least 1");
  AnnealTemperature(0, c.temperature);  // throws InvalidSchedule
}

}  // namespace

Trainer::Trainer(KeagModel& model, const Vocabulary& vocab, TrainingConfig config)
    : model_(model),
      vocab_(vocab),
      config_(config),
      adam_(config.adam),
      noise_rng_(config.seed ^ kNoiseStream),
      order_rng_(config.seed) {
  ValidateTraining(config_);
  if (vocab.size() != model.config().vocab_size) {
    throw Error(ErrorKind::kDimensionMismatch, "vocabulary size differs from the model's");
  }
}

StepMetrics Trainer::Step(std::span<const TrainingItem* const> batch) {
  if (batch.empty()) throw Error(ErrorKind::kEmptyInput, "empty batch");
  StepMetrics m;
  m.tau = AnnealTemperature(step_, config_.temperature);

  ad::Tape tape;
  const ModelVars vars = model_.Bind(tape, true);
  Var total;
  std::array<std::size_t, kNumSources> counts{};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ElboResult r = ElboLoss(model_, vars, *batch[i], vocab_, m.tau, noise_rng_, config_.loss);
    total = i == 0 ? r.loss : total + r.loss;
    for (std::size_t y = 0; y < kNumSources; ++y) counts[y] += r.source_counts[y];
    m.tokens += r.steps.size();
  }
  Var loss = scale(total, 1.0 / static_cast<double>(batch.size()));
  m.loss = loss.scalar();
  for (std::size_t y = 0; y < kNumSources; ++y) {
    m.source_freqs[y] = static_cast<double>(counts[y]) / static_cast<double>(m.tokens);
  }

  ++step_;
  m.step = step_;
  std::vector<Tensor> grads;
  try {
    ad::Gradients g = tape.backward(loss);
    grads.reserve(vars.all.size());
    for (const Var& v : vars.all) grads.push_back(g[v]);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonFiniteGradient) throw;
    ++skipped_;
    m.skipped = true;
    return m;
  }
  m.grad_norm = ClipGlobalNorm(grads, config_.clip_norm);
  if (!std::isfinite(m.grad_norm)) {
    ++skipped_;
    m.skipped = true;
    return m;
  }
  adam_.Update(model_.params(), grads);
  return m;
}

void Trainer::Train(std::span<const TrainingItem> data,
                    const std::function<void(const StepMetrics&)>& on_step) {
  if (data.empty()) throw Error(ErrorKind::kEmptyCorpus, "no training examples");
  std::vector<std::size_t> order(data.size());
  std::size_t cursor = order.size();
  while (step_ < config_.max_steps) {
    std::vector<const TrainingItem*> batch;
    while (batch.size() < std::min(config_.batch_size, data.size())) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), 0);
        order_rng_.shuffle(order);
        cursor = 0;
      }
      batch.push_back(&data[order[cursor++]]);
    }
    StepMetrics m = Step(batch);
    if (on_step) on_step(m);
  }
}

}  // namespace keag
