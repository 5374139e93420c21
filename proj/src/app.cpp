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

#include "app.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "keag/checkpoint.hpp"
#include "keag/error.hpp"
#include "keag/metrics.hpp"
#include "keag/trainer.hpp"

namespace keag::app {

namespace {

const std::string& Require(const std::string& value, const char* key) {
  if (value.empty()) {
    throw Error(ErrorKind::kConfig, std::string("missing required setting ") + key);
  }
  return value;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  return out;
}

Vocabulary LoadVocab(const RunConfig& c) { return Vocabulary::Load(Require(c.paths.vocab, "paths.vocab")); }

KnowledgeBase LoadKb(const RunConfig& c) {
  if (c.paths.kb.empty()) return KnowledgeBase{};
  KnowledgeBase kb = KnowledgeBase::Ingest(c.paths.kb);
  if (kb.malformed_lines() > 0) {
    Log("kb_malformed_lines", {{"path", c.paths.kb}, {"count", kb.malformed_lines()}});
  }
  if (kb.relation_count() > c.model.num_relations) {
    throw Error(ErrorKind::kConfig,
                "knowledge base has " + std::to_string(kb.relation_count()) +
                    " relation types but model.num_relations is " +
                    std::to_string(c.model.num_relations));
  }
  return kb;
}

std::vector<Fact> RelatedFacts(const KnowledgeBase& kb, const Example& ex, std::size_t max_facts) {
  std::vector<Fact> facts;
  if (kb.size() == 0) return facts;
  for (const ScoredFact& s : ExtractRelatedFacts(kb, ex.question, ex.passage, max_facts)) {
    facts.push_back(kb.fact(s.fact_id));
  }
  return facts;
}

Json SourceArray(const std::array<double, kNumSources>& v) {
  Json j = Json::object();
  for (std::size_t y = 0; y < kNumSources; ++y) j[SourceName(static_cast<Source>(y))] = v[y];
  return j;
}

}  // namespace

void Log(const std::string& event, Json fields) {
  Json line = Json::object();
  line["event"] = event;
  for (auto& [k, v] : fields.items()) line[k] = v;
  std::cerr << line.dump() << '\n';
}

Json Prepare(const RunConfig& config) {
  config.Validate();
  const auto raw = LoadDataset(Require(config.paths.train, "paths.train"));
  std::vector<Tokens> corpus;
  for (const RawExample& r : raw) {
    corpus.push_back(Tokenize(r.question));
    Tokens p = Tokenize(r.passage);
    if (p.size() > config.data.limits.passage) p.resize(config.data.limits.passage);
    corpus.push_back(std::move(p));
    corpus.push_back(Tokenize(r.answer));
  }
  const Vocabulary vocab = Vocabulary::Build(corpus, config.data.vocab_size, config.data.min_count);
  vocab.Save(Require(config.paths.vocab, "paths.vocab"));
  std::size_t tokens = 0, unknown = 0;
  for (const Tokens& t : corpus) {
    for (const std::string& w : t) {
      ++tokens;
      unknown += !vocab.contains(w);
    }
  }
  Json summary = {{"examples", raw.size()},
                  {"vocab_size", vocab.size()},
                  {"vocab_hash", vocab.Hash()},
                  {"tokens", tokens},
                  {"oov_rate", tokens ? static_cast<double>(unknown) / tokens : 0.0}};
  Log("prepare_done", summary);
  return summary;
}

Json FactRecord(const KnowledgeBase& kb, const ScoredFact& scored) {
  const Fact& f = kb.fact(scored.fact_id);
  return {{"fact_id", f.fact_id},
          {"subject", JoinTokens(f.subject)},
          {"relation", kb.relation_names()[f.relation]},
          {"object", JoinTokens(f.object)},
          {"score", scored.score}};
}

Json ExtractFactsFile(const RunConfig& config) {
  config.Validate();
  const KnowledgeBase kb = KnowledgeBase::Ingest(Require(config.paths.kb, "paths.kb"));
  const auto raw = LoadDataset(Require(config.paths.eval, "paths.eval"));
  std::ofstream out = OpenOutput(Require(config.paths.output, "paths.output"));
  std::size_t records = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Tokens q = Tokenize(raw[i].question);
    Tokens p = Tokenize(raw[i].passage);
    if (p.size() > config.data.limits.passage) p.resize(config.data.limits.passage);
    for (const ScoredFact& s : ExtractRelatedFacts(kb, q, p, config.data.max_facts)) {
      Json rec = {{"example", i}};
      rec.update(FactRecord(kb, s));
      out << rec.dump() << '\n';
      ++records;
    }
  }
  Json summary = {{"examples", raw.size()}, {"records", records}, {"kb_facts", kb.size()}};
  Log("extract_facts_done", summary);
  return summary;
}

Json Train(const RunConfig& config) {
  config.Validate();
  const Vocabulary vocab = LoadVocab(config);
  const KnowledgeBase kb = LoadKb(config);
  const auto raw = LoadDataset(Require(config.paths.train, "paths.train"));
  const std::string& checkpoint_path = Require(config.paths.checkpoint, "paths.checkpoint");
  const std::vector<TrainingItem> items =
      PrepareItems(raw, vocab, kb, config.data.max_facts, config.data.limits);

  ModelConfig mc = config.model;
  mc.vocab_size = vocab.size();
  std::optional<EmbeddingTable> embeddings;
  if (!config.paths.embeddings.empty()) {
    embeddings = LoadPretrainedEmbeddings(config.paths.embeddings, vocab, mc.emb_dim,
                                          config.train.seed);
    Log("embeddings_loaded", {{"covered", embeddings->covered}, {"rows", vocab.size()}});
  }
  KeagModel model(mc, config.train.seed, embeddings ? &*embeddings : nullptr);
  Log("train_start", {{"examples", items.size()},
                      {"parameters", model.params().total_elements()},
                      {"vocab_size", vocab.size()},
                      {"kb_facts", kb.size()}});

  std::ofstream metrics;
  if (!config.paths.metrics_log.empty()) metrics = OpenOutput(config.paths.metrics_log);
  Trainer trainer(model, vocab, config.train);
  double recent = 0.0;
  std::size_t recent_n = 0;
  trainer.Train(items, [&](const StepMetrics& m) {
    if (!std::isfinite(m.loss)) throw Error(ErrorKind::kNonFiniteLoss, "training loss diverged");
    recent += m.loss;
    ++recent_n;
    if (metrics.is_open()) {
      Json rec = {{"step", m.step}, {"loss", m.loss}, {"source_freqs", SourceArray(m.source_freqs)},
                  {"tau", m.tau}};
      if (m.skipped) rec["skipped"] = true;
      metrics << rec.dump() << '\n';
    }
    if (config.log_every > 0 && (m.step % config.log_every == 0 || m.step == config.train.max_steps)) {
      Log("train_progress", {{"step", m.step}, {"loss", recent / static_cast<double>(recent_n)}, {"tau", m.tau}});
      recent = 0.0;
      recent_n = 0;
    }
  });

  Checkpoint c;
  c.step = trainer.step();
  c.vocab_hash = vocab.Hash();
  // File locations are not part of the model; leaving them out keeps the
  // checkpoint a function of data, settings and seed only.
  RunConfig snapshot = config;
  snapshot.paths = PathConfig{};
  c.config_text = snapshot.ToText();
  c.params = model.params();
  SaveCheckpoint(c, checkpoint_path);
  Json summary = {{"steps", trainer.step()},
                  {"skipped_steps", trainer.skipped_steps()},
                  {"checkpoint", checkpoint_path}};
  Log("train_done", summary);
  return summary;
}

// ---------------------------------------------------------------------------

Session::Session(const RunConfig& config) : config_(config) {
  config_.Validate();
  vocab_ = LoadVocab(config_);
  Checkpoint c = LoadCheckpoint(Require(config_.paths.checkpoint, "paths.checkpoint"), vocab_.Hash());
  // Architecture comes from the checkpoint, not from the caller's config.
  RunConfig trained;
  std::istringstream snapshot(c.config_text);
  trained.Parse(snapshot, "checkpoint config");
  ModelConfig mc = InferModelConfig(c.params);
  mc.use_knowledge = trained.model.use_knowledge;
  mc.init_range = trained.model.init_range;
  config_.model = mc;
  kb_ = LoadKb(config_);
  model_ = std::make_unique<KeagModel>(mc, std::move(c.params));
}

GenerationResult Session::Answer(const std::string& question, const std::string& passage) const {
  const Example ex = EncodeExample(question, passage, "", vocab_, config_.data.limits);
  const std::vector<Fact> facts = RelatedFacts(kb_, ex, config_.data.max_facts);
  return Generate(*model_, vocab_, ex, facts, config_.generate);
}

Json TraceJson(const SourceTrace& trace) {
  Json out = Json::array();
  for (const TraceRecord& r : trace) {
    Json rec = {{"token", r.token},
                {"source", SourceName(r.source)},
                {"source_probs", SourceArray(r.source_probs)},
                {"word_prob", r.word_prob}};
    if (r.fact_id) rec["fact_id"] = *r.fact_id;
    if (r.continuation) rec["continuation"] = true;
    out.push_back(std::move(rec));
  }
  return out;
}

Json Session::AnswerJson(const std::string& question, const std::string& passage,
                         std::string* rendered_trace) const {
  const GenerationResult r = Answer(question, passage);
  if (rendered_trace) *rendered_trace = RenderTrace(r.trace);
  return {{"question", question},
          {"answer", JoinTokens(r.answer)},
          {"score", r.score},
          {"normalized_score", r.normalized_score},
          {"trace", TraceJson(r.trace)}};
}

Json GenerateFile(const RunConfig& config, std::ostream* trace_out) {
  const Session session(config);
  const auto raw = LoadDataset(Require(config.paths.eval, "paths.eval"));
  std::ofstream out = OpenOutput(Require(config.paths.output, "paths.output"));
  for (const RawExample& r : raw) {
    std::string table;
    Json rec = session.AnswerJson(r.question, r.passage, trace_out ? &table : nullptr);
    out << rec.dump() << '\n';
    if (trace_out) *trace_out << "Q: " << r.question << '\n' << table << '\n';
  }
  Json summary = {{"examples", raw.size()}, {"output", config.paths.output}};
  Log("generate_done", summary);
  return summary;
}

Json EvaluateFiles(const std::string& predictions, const std::string& references) {
  const auto preds = LoadDataset(predictions);
  const auto refs = LoadDataset(references);
  if (preds.size() != refs.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                std::to_string(preds.size()) + " predictions vs " + std::to_string(refs.size()) +
                    " references");
  }
  std::vector<Tokens> cand, ref;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    cand.push_back(Tokenize(preds[i].answer));
    ref.push_back(Tokenize(refs[i].answer));
  }
  const MetricReport m = Evaluate(cand, ref);
  Json report = {{"rouge_l", m.rouge_l}, {"bleu_1", m.bleu_1}, {"examples", preds.size()},
                 {"rouge_l_per_example", m.rouge_per_example}};
  return report;
}

Json Synth(const std::string& task, std::size_t size, std::uint64_t seed,
           const std::string& out_dir) {
  const SynthDataset d = GenerateSynth(ParseSynthTask(task), size, seed);
  if (out_dir.empty()) throw Error(ErrorKind::kConfig, "missing output directory");
  WriteSynth(d, out_dir);
  Json summary = {{"task", task}, {"examples", d.examples.size()}, {"kb_facts", d.kb.size()},
                  {"dir", out_dir}};
  Log("synth_done", summary);
  return summary;
}

}  // namespace keag::app
