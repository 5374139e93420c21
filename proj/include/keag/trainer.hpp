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

#ifndef KEAG_TRAINER_HPP_
#define KEAG_TRAINER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "keag/knowledge.hpp"
#include "keag/model.hpp"
#include "keag/rng.hpp"
#include "keag/selectors.hpp"
#include "keag/text.hpp"

namespace keag {

// One training instance: the encoded example and its ranked related facts.
struct TrainingItem {
  Example example;
  std::vector<Fact> facts;

  std::vector<const Fact*> fact_pointers() const;
};

// Encodes raw examples and attaches the top `max_facts` related facts.
std::vector<TrainingItem> PrepareItems(std::span<const RawExample> raw, const Vocabulary& vocab,
                                       const KnowledgeBase& kb, std::size_t max_facts,
                                       const TextLimits& limits);

enum class Estimator {
  kGumbel,  // sampled relaxations of the source and fact choices
  kExact,   // expectation under the selector probabilities themselves
};

struct LossConfig {
  double coverage_weight = 1.0;
  std::size_t mc_samples = 1;
  Estimator estimator = Estimator::kGumbel;
};

struct StepDiagnostics {
  std::array<double, kNumSources> source_probs{};
  // Per-source word likelihoods of the target, floored at kProbFloor. The
  // knowledge entry uses the fact weights of the first Monte Carlo sample in
  // Gumbel mode and the fact posterior in exact mode.
  std::array<double, kNumSources> word_probs{};
  std::size_t selected = 0;  // hard source of the first sample
};

struct ElboResult {
  ad::Var loss;             // -objective + coverage_weight * coverage
  double objective = 0.0;   // estimated lower bound, summed over steps
  double coverage = 0.0;
  std::vector<StepDiagnostics> steps;
  std::array<std::size_t, kNumSources> source_counts{};

  // Exact marginal log-likelihood and exact lower bound built from the step
  // diagnostics; these are Monte Carlo free only in exact mode.
  double marginal_log_likelihood() const;
  double exact_lower_bound() const;
};

// Teacher-forced negative lower bound for one example. `vars` must be bound
// on the tape that will be differentiated.
ElboResult ElboLoss(const KeagModel& model, const ModelVars& vars, const TrainingItem& item,
                    const Vocabulary& vocab, double tau, Rng& rng, const LossConfig& config);

// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}
  void Update(ParameterStore& params, std::span<const ad::Tensor> grads);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<ad::Tensor> m_, v_;
};

// Scales `grads` in place so their joint L2 norm is at most `max_norm`.
// Returns the norm before clipping.
double ClipGlobalNorm(std::span<ad::Tensor> grads, double max_norm);

struct TrainingConfig {
  std::size_t batch_size = 16;
  std::size_t max_steps = 1000;
  double clip_norm = 2.0;
  std::uint64_t seed = 1;
  TemperatureSchedule temperature;
  LossConfig loss;
  AdamConfig adam;
};

struct StepMetrics {
  std::size_t step = 0;  // 1-based index of the completed step
  double loss = 0.0;     // mean batch loss
  double tau = 1.0;
  double grad_norm = 0.0;
  std::size_t tokens = 0;
  std::array<double, kNumSources> source_freqs{};
  bool skipped = false;
};

class Trainer {
 public:
  Trainer(KeagModel& model, const Vocabulary& vocab, TrainingConfig config);

  // One gradient step on the mean loss of `batch`. A non-finite gradient
  // skips the update and increments skipped_steps().
  StepMetrics Step(std::span<const TrainingItem* const> batch);

  // Runs until max_steps, cycling through `data` in epochs shuffled with the
  // run seed. `on_step` sees every step's metrics.
  void Train(std::span<const TrainingItem> data,
             const std::function<void(const StepMetrics&)>& on_step = {});

  std::size_t step() const { return step_; }
  std::size_t skipped_steps() const { return skipped_; }

 private:
  KeagModel& model_;
  const Vocabulary& vocab_;
  TrainingConfig config_;
  Adam adam_;
  Rng noise_rng_;
  Rng order_rng_;
  std::size_t step_ = 0;
  std::size_t skipped_ = 0;
};

}  // namespace keag

#endif  // KEAG_TRAINER_HPP_
