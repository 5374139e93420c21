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

#include "keag/keag.h"

#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>

#include "app.hpp"
#include "keag/error.hpp"

struct keag_config {
  keag::RunConfig config;
};

struct keag_kb {
  keag::KnowledgeBase kb;
};

struct keag_model {
  std::unique_ptr<keag::app::Session> session;
};

namespace {

thread_local std::string g_last_error;

keag_status Fail(keag_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

char* Copy(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Put(char** out, const std::string& s) {
  if (out) *out = Copy(s);
}

template <typename F>
keag_status Guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return KEAG_OK;
  } catch (const keag::Error& e) {
    switch (e.category()) {
      case keag::ErrorCategory::kConfig: return Fail(KEAG_ERR_CONFIG, e.what());
      case keag::ErrorCategory::kData: return Fail(KEAG_ERR_DATA, e.what());
      case keag::ErrorCategory::kNumeric: return Fail(KEAG_ERR_NUMERIC, e.what());
      case keag::ErrorCategory::kInternal: return Fail(KEAG_ERR_INTERNAL, e.what());
    }
    return Fail(KEAG_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(KEAG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(KEAG_ERR_INTERNAL, e.what());
  }
}

keag_status NullArgument(const char* name) {
  return Fail(KEAG_ERR_CONFIG, std::string("null argument: ") + name);
}

}  // namespace

extern "C" {

const char* keag_last_error(void) { return g_last_error.c_str(); }

void keag_free_string(char* s) { std::free(s); }

keag_status keag_config_create(keag_config** out) {
  if (!out) return NullArgument("out");
  return Guard([&] { *out = new keag_config(); });
}

keag_status keag_config_load_file(keag_config* config, const char* path) {
  if (!config || !path) return NullArgument("config/path");
  return Guard([&] { config->config.LoadFile(path); });
}

keag_status keag_config_set(keag_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return NullArgument("config/key/value");
  return Guard([&] { config->config.Set(key, value); });
}

keag_status keag_config_to_string(const keag_config* config, char** out) {
  if (!config || !out) return NullArgument("config/out");
  return Guard([&] { Put(out, config->config.ToText()); });
}

void keag_config_destroy(keag_config* config) { delete config; }

keag_status keag_prepare(const keag_config* config, char** summary) {
  if (!config) return NullArgument("config");
  return Guard([&] { Put(summary, keag::app::Prepare(config->config).dump()); });
}

keag_status keag_extract_facts(const keag_config* config, char** summary) {
  if (!config) return NullArgument("config");
  return Guard([&] { Put(summary, keag::app::ExtractFactsFile(config->config).dump()); });
}

keag_status keag_train(const keag_config* config, char** summary) {
  if (!config) return NullArgument("config");
  return Guard([&] { Put(summary, keag::app::Train(config->config).dump()); });
}

keag_status keag_generate(const keag_config* config, char** summary, char** trace_text) {
  if (!config) return NullArgument("config");
  return Guard([&] {
    std::ostringstream traces;
    const auto s = keag::app::GenerateFile(config->config, trace_text ? &traces : nullptr);
    Put(summary, s.dump());
    Put(trace_text, traces.str());
  });
}

keag_status keag_evaluate(const char* predictions, const char* references, char** report) {
  if (!predictions || !references) return NullArgument("predictions/references");
  return Guard([&] { Put(report, keag::app::EvaluateFiles(predictions, references).dump()); });
}

keag_status keag_synth(const char* task, size_t size, uint64_t seed, const char* out_dir,
                       char** summary) {
  if (!task || !out_dir) return NullArgument("task/out_dir");
  return Guard([&] { Put(summary, keag::app::Synth(task, size, seed, out_dir).dump()); });
}

keag_status keag_kb_open(const char* path, keag_kb** out) {
  if (!path || !out) return NullArgument("path/out");
  return Guard([&] { *out = new keag_kb{keag::KnowledgeBase::Ingest(path)}; });
}

keag_status keag_kb_extract(const keag_kb* kb, const char* question, const char* passage,
                            size_t max_facts, char** facts_json) {
  if (!kb || !question || !passage || !facts_json) return NullArgument("kb/question/passage/out");
  return Guard([&] {
    keag::app::Json records = keag::app::Json::array();
    for (const keag::ScoredFact& s : keag::ExtractRelatedFacts(
             kb->kb, keag::Tokenize(question), keag::Tokenize(passage), max_facts)) {
      records.push_back(keag::app::FactRecord(kb->kb, s));
    }
    Put(facts_json, records.dump());
  });
}

void keag_kb_close(keag_kb* kb) { delete kb; }

keag_status keag_model_open(const keag_config* config, keag_model** out) {
  if (!config || !out) return NullArgument("config/out");
  return Guard([&] {
    *out = new keag_model{std::make_unique<keag::app::Session>(config->config)};
  });
}

keag_status keag_model_generate(const keag_model* model, const char* question,
                                const char* passage, char** answer_json, char** trace_text) {
  if (!model || !question || !passage || !answer_json) {
    return NullArgument("model/question/passage/out");
  }
  return Guard([&] {
    std::string table;
    Put(answer_json,
        model->session->AnswerJson(question, passage, trace_text ? &table : nullptr).dump());
    Put(trace_text, table);
  });
}

void keag_model_close(keag_model* model) { delete model; }

}  // extern "C"
