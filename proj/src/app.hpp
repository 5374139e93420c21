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

// Command implementations shared by the C API. Internal header.

#ifndef KEAG_SRC_APP_HPP_
#define KEAG_SRC_APP_HPP_

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "keag/config.hpp"
#include "keag/generator.hpp"
#include "keag/knowledge.hpp"
#include "keag/model.hpp"
#include "keag/synth.hpp"

namespace keag::app {

using Json = nlohmann::ordered_json;

// One JSON object per line on standard error.
void Log(const std::string& event, Json fields = Json::object());

Json Prepare(const RunConfig& config);

Json FactRecord(const KnowledgeBase& kb, const ScoredFact& scored);
// Ranked facts for each example of paths.eval, written to paths.output.
Json ExtractFactsFile(const RunConfig& config);

Json Train(const RunConfig& config);

// A loaded checkpoint plus everything needed to answer questions.
class Session {
 public:
  explicit Session(const RunConfig& config);
  GenerationResult Answer(const std::string& question, const std::string& passage) const;
  Json AnswerJson(const std::string& question, const std::string& passage,
                  std::string* rendered_trace = nullptr) const;
  const RunConfig& config() const { return config_; }

 private:
  RunConfig config_;
  Vocabulary vocab_;
  KnowledgeBase kb_;
  std::unique_ptr<KeagModel> model_;
};

Json TraceJson(const SourceTrace& trace);

// Answers every example of paths.eval into paths.output; rendered traces go
// to `trace_out` when given.
Json GenerateFile(const RunConfig& config, std::ostream* trace_out);

Json EvaluateFiles(const std::string& predictions, const std::string& references);

Json Synth(const std::string& task, std::size_t size, std::uint64_t seed,
           const std::string& out_dir);

}  // namespace keag::app

#endif  // KEAG_SRC_APP_HPP_
