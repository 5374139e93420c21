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

#include "keag/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "keag/error.hpp"

namespace keag {

namespace {

struct Hypothesis {
  Tokens tokens;
  SourceTrace trace;
  double score = 0.0;
  DecoderCarry carry;
  std::size_t input_id = Vocabulary::kBos;
  std::deque<std::string> pending;  // rest of a selected fact object
  bool finished = false;

  double normalized() const {
    return trace.empty() ? score : score / static_cast<double>(trace.size());
  }
};

bool IsEnd(const std::string& token) { return token == "</s>"; }

class BeamSearch {
 public:
  BeamSearch(const KeagModel& model, const Vocabulary& vocab, const Example& example,
             std::span<const Fact> facts, const GenerationConfig& config)
      : model_(model), vocab_(vocab), example_(example), facts_(facts), config_(config) {
    vars_ = model_.Bind(tape_, false);
    for (const Fact& f : facts_) fact_pointers_.push_back(&f);
    for (const Fact& f : facts_) fact_objects_.push_back(&f.object);
    context_ = model_.Prepare(vars_, example_, fact_pointers_, vocab_);
  }

  Hypothesis Run(std::size_t beam) {
    Hypothesis start;
    start.carry = context_.initial;
    std::vector<Hypothesis> live = {start};
    std::vector<Hypothesis> done;
    while (!live.empty() && done.size() < beam) {
      std::vector<Hypothesis> candidates;
      for (const Hypothesis& h : live) Expand(h, beam, candidates);
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const Hypothesis& a, const Hypothesis& b) { return a.score > b.score; });
      live.clear();
      for (Hypothesis& c : candidates) {
        if (live.size() + done.size() >= beam) break;
        if (c.finished || c.tokens.size() >= config_.max_length) {
          c.finished = true;
          done.push_back(std::move(c));
        } else {
          live.push_back(std::move(c));
        }
      }
    }
    // Length limit not reached by anyone: unfinished survivors compete too.
    for (Hypothesis& h : live) done.push_back(std::move(h));
    std::stable_sort(done.begin(), done.end(), [](const Hypothesis& a, const Hypothesis& b) {
      return a.normalized() > b.normalized();
    });
    return std::move(done.front());
  }

 private:
  void Expand(const Hypothesis& h, std::size_t width, std::vector<Hypothesis>& out) {
    StepResult r = model_.Step(vars_, context_, h.carry, h.input_id);

    if (!h.pending.empty()) {
      Hypothesis next = h;
      next.carry = r.next;
      TraceRecord rec = h.trace.back();
      rec.token = next.pending.front();
      rec.word_prob = 1.0;
      rec.continuation = true;
      next.pending.pop_front();
      Emit(next, std::move(rec));
      out.push_back(std::move(next));
      return;
    }

    std::array<double, kNumSources> py{};
    for (std::size_t y = 0; y < kNumSources; ++y) py[y] = r.source_probs.value()[y];
    const std::size_t chosen =
        static_cast<std::size_t>(std::max_element(py.begin(), py.end()) - py.begin());
    const Source source = static_cast<Source>(chosen);

    SourceInputs in;
    in.question = example_.question;
    in.passage = example_.passage;
    in.question_attention = r.question_attention.value().data();
    in.passage_attention = r.passage_attention.value().data();
    in.vocab_probs = r.vocab_probs.value().data();
    in.vocab = &vocab_;
    if (r.fact_probs) {
      in.fact_weights = r.fact_probs->value().data();
      in.fact_objects = fact_objects_;
    }
    std::vector<WordProb> words = SourceWordDistribution(source, in);
    if (source == Source::kVocabulary) {
      std::erase_if(words, [](const WordProb& w) {
        return w.token == "<pad>" || w.token == "<s>" || w.token == "<unk>";
      });
    }
    std::erase_if(words, [](const WordProb& w) { return !(w.prob > 0.0); });
    std::stable_sort(words.begin(), words.end(),
                     [](const WordProb& a, const WordProb& b) { return a.prob > b.prob; });
    if (words.size() > width) words.resize(width);

    for (const WordProb& w : words) {
      Hypothesis next = h;
      next.carry = r.next;
      TraceRecord rec;
      rec.token = w.token;
      rec.source_probs = py;
      rec.source = source;
      rec.word_prob = w.prob;
      next.score += std::log(py[chosen]) + std::log(w.prob);
      if (source == Source::kKnowledge) {
        const Fact& f = facts_[w.fact_index];
        rec.fact_id = f.fact_id;
        next.pending.assign(f.object.begin() + 1, f.object.end());
      }
      Emit(next, std::move(rec));
      out.push_back(std::move(next));
    }
  }

  void Emit(Hypothesis& h, TraceRecord rec) {
    if (IsEnd(rec.token)) {
      h.finished = true;
      h.pending.clear();
    } else {
      h.tokens.push_back(rec.token);
    }
    h.input_id = vocab_.id(rec.token);  // unknown words feed back as <unk>
    h.trace.push_back(std::move(rec));
  }

  const KeagModel& model_;
  const Vocabulary& vocab_;
  const Example& example_;
  std::span<const Fact> facts_;
  GenerationConfig config_;
  ad::Tape tape_;
  ModelVars vars_;
  std::vector<const Fact*> fact_pointers_;
  std::vector<const Tokens*> fact_objects_;
  ExampleContext context_;
};

}  // namespace

GenerationResult Generate(const KeagModel& model, const Vocabulary& vocab,
                          const Example& example, std::span<const Fact> facts,
                          const GenerationConfig& config) {
  if (config.beam == 0) throw Error(ErrorKind::kConfig, "beam must be at least 1");
  if (config.max_length == 0) throw Error(ErrorKind::kConfig, "max_length must be at least 1");
  if (example.question_ids.empty()) throw Error(ErrorKind::kEmptyQuestion, "empty question");
  BeamSearch search(model, vocab, example, facts, config);
  Hypothesis best = search.Run(config.beam);
  if (config.beam > 1) {
    // The greedy path is always a candidate, so widening never loses to it.
    Hypothesis greedy = search.Run(1);
    if (greedy.normalized() > best.normalized()) best = std::move(greedy);
  }
  GenerationResult out;
  out.score = best.score;
  out.normalized_score = best.normalized();
  out.answer = std::move(best.tokens);
  out.trace = std::move(best.trace);
  return out;
}

double TraceScore(const SourceTrace& trace) {
  double score = 0.0;
  for (const TraceRecord& r : trace) {
    if (r.continuation) continue;
    score += std::log(r.source_probs[static_cast<std::size_t>(r.source)]) + std::log(r.word_prob);
  }
  return score;
}

std::string RenderTrace(const SourceTrace& trace) {
  if (trace.empty()) return {};
  const std::size_t label = std::string("vocabulary").size();
  std::vector<std::size_t> width;
  for (const TraceRecord& r : trace) width.push_back(std::max<std::size_t>(r.token.size(), 10));

  std::ostringstream out;
  auto cell = [&](const std::string& text, std::size_t w) {
    out << ' ' << text << std::string(w > text.size() ? w - text.size() : 0, ' ');
  };
  cell("", label);
  for (std::size_t i = 0; i < trace.size(); ++i) cell(trace[i].token, width[i]);
  out << '\n';
  for (std::size_t y = 0; y < kNumSources; ++y) {
    cell(SourceName(static_cast<Source>(y)), label);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * trace[i].source_probs[y]);
      cell(buf, width[i]);
    }
    out << '\n';
  }
  cell("chosen", label);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    cell(SourceName(trace[i].source), width[i]);
  }
  out << '\n';
  return out.str();
}

}  // namespace keag
