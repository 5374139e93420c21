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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "keag/keag.h"

namespace {

struct Owned {
  char* s = nullptr;
  ~Owned() { keag_free_string(s); }
  std::string str() const { return s ? s : ""; }
};

using ConfigPtr = std::unique_ptr<keag_config, decltype(&keag_config_destroy)>;

int Report(keag_status status, const char* command) {
  if (status != KEAG_OK) {
    std::cerr << "keag " << command << ": " << keag_last_error() << '\n';
  }
  return static_cast<int>(status);
}

// Options shared by commands that run from a config file.
struct ConfigOptions {
  std::string file;
  std::vector<std::string> sets;
  std::string seed;
  std::vector<std::pair<std::string, std::string>> paths;  // key, value

  void Attach(CLI::App* cmd, const std::vector<std::pair<std::string, std::string>>& path_flags) {
    cmd->add_option("--config", file, "Config file ([section] and key = value lines)");
    cmd->add_option("--set", sets, "Override a config key, e.g. --set train.lr=0.01")
        ->type_name("KEY=VALUE");
    cmd->add_option("--seed", seed, "Run seed (train.seed)");
    paths.reserve(path_flags.size());
    for (const auto& [flag, key] : path_flags) {
      paths.emplace_back(key, "");
      cmd->add_option("--" + flag, paths.back().second, "Sets " + key);
    }
  }

  // Defaults, then the file, then path flags, then --set, then --seed.
  keag_status Build(ConfigPtr& out) const {
    keag_config* raw = nullptr;
    if (keag_status s = keag_config_create(&raw); s != KEAG_OK) return s;
    out.reset(raw);
    if (!file.empty()) {
      if (keag_status s = keag_config_load_file(raw, file.c_str()); s != KEAG_OK) return s;
    }
    for (const auto& [key, value] : paths) {
      if (value.empty()) continue;
      if (keag_status s = keag_config_set(raw, key.c_str(), value.c_str()); s != KEAG_OK) return s;
    }
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      const std::string key = kv.substr(0, eq);
      const std::string value = eq == std::string::npos ? "" : kv.substr(eq + 1);
      if (keag_status s = keag_config_set(raw, key.c_str(), value.c_str()); s != KEAG_OK) return s;
    }
    if (!seed.empty()) {
      if (keag_status s = keag_config_set(raw, "train.seed", seed.c_str()); s != KEAG_OK) return s;
    }
    return KEAG_OK;
  }
};

void PrintSummary(const char* command, const Owned& summary) {
  std::cout << command << ": " << summary.str() << '\n';
}

}  // namespace

const std::vector<std::pair<std::string, std::string>> kPathFlags = {
    {"train", "paths.train"},         {"eval", "paths.eval"},
    {"kb", "paths.kb"},               {"vocab", "paths.vocab"},
    {"embeddings", "paths.embeddings"}, {"checkpoint", "paths.checkpoint"},
    {"metrics-log", "paths.metrics_log"}, {"output", "paths.output"}};

int main(int argc, char** argv) {
  CLI::App app{"KEAG: knowledge-enriched answer generation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  ConfigOptions prepare_opts;
  auto* prepare = app.add_subcommand("prepare", "Build the vocabulary from the training set");
  prepare_opts.Attach(prepare, kPathFlags);

  ConfigOptions extract_opts;
  std::string question, passage;
  std::size_t max_facts = 0;
  auto* extract = app.add_subcommand("extract-facts", "Rank related knowledge facts");
  extract_opts.Attach(extract, kPathFlags);
  extract->add_option("--question", question, "Score facts for one question (prints JSONL)");
  extract->add_option("--passage", passage, "Passage paired with --question");
  extract->add_option("--max-facts", max_facts, "Override data.max_facts");

  ConfigOptions train_opts;
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_opts.Attach(train, kPathFlags);

  ConfigOptions generate_opts;
  bool trace = false;
  std::string gen_question, gen_passage;
  auto* generate = app.add_subcommand("generate", "Answer questions with a trained checkpoint");
  generate_opts.Attach(generate, kPathFlags);
  generate->add_flag("--trace", trace, "Print the per-token source table");
  generate->add_option("--question", gen_question, "Answer one question (prints JSON)");
  generate->add_option("--passage", gen_passage, "Passage paired with --question");

  std::string predictions, references, report_path;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions with ROUGE-L and BLEU-1");
  evaluate->add_option("--predictions", predictions, "Predictions JSONL")->required();
  evaluate->add_option("--references", references, "References JSONL")->required();
  evaluate->add_option("--output", report_path, "Write the report JSON here as well");

  std::string task, out_dir;
  std::size_t size = 0;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset and knowledge base");
  synth->add_option("--task", task, "copy-q, copy-p, vocab-fill, kb-lookup or mixed")->required();
  synth->add_option("--size", size, "Number of examples")->required();
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return KEAG_ERR_CONFIG;
  }

  ConfigPtr config(nullptr, keag_config_destroy);
  auto with_config = [&](const ConfigOptions& opts, const char* name, auto&& run) {
    if (keag_status s = opts.Build(config); s != KEAG_OK) return Report(s, name);
    return run();
  };

  if (*prepare) {
    return with_config(prepare_opts, "prepare", [&] {
      Owned summary;
      keag_status s = keag_prepare(config.get(), &summary.s);
      if (s == KEAG_OK) PrintSummary("prepare", summary);
      return Report(s, "prepare");
    });
  }
  if (*extract) {
    if (max_facts > 0) {
      extract_opts.sets.push_back("data.max_facts=" + std::to_string(max_facts));
    }
    return with_config(extract_opts, "extract-facts", [&] {
      if (!question.empty()) {
        Owned text, facts;
        keag_status s = keag_config_to_string(config.get(), &text.s);
        if (s != KEAG_OK) return Report(s, "extract-facts");
        const std::string cfg = text.str();
        const auto at = cfg.find("kb = \"");
        const std::string kb_path =
            at == std::string::npos ? "" : cfg.substr(at + 6, cfg.find('"', at + 6) - at - 6);
        const auto mf = cfg.find("max_facts = ");
        const std::size_t limit = std::stoul(cfg.substr(mf + 12));
        keag_kb* kb = nullptr;
        s = keag_kb_open(kb_path.c_str(), &kb);
        if (s != KEAG_OK) return Report(s, "extract-facts");
        s = keag_kb_extract(kb, question.c_str(), passage.c_str(), limit, &facts.s);
        keag_kb_close(kb);
        if (s == KEAG_OK) std::cout << facts.str() << '\n';
        return Report(s, "extract-facts");
      }
      Owned summary;
      keag_status s = keag_extract_facts(config.get(), &summary.s);
      if (s == KEAG_OK) PrintSummary("extract-facts", summary);
      return Report(s, "extract-facts");
    });
  }
  if (*train) {
    return with_config(train_opts, "train", [&] {
      Owned summary;
      keag_status s = keag_train(config.get(), &summary.s);
      if (s == KEAG_OK) PrintSummary("train", summary);
      return Report(s, "train");
    });
  }
  if (*generate) {
    return with_config(generate_opts, "generate", [&] {
      if (!gen_question.empty()) {
        keag_model* model = nullptr;
        keag_status s = keag_model_open(config.get(), &model);
        if (s != KEAG_OK) return Report(s, "generate");
        Owned answer, table;
        s = keag_model_generate(model, gen_question.c_str(), gen_passage.c_str(), &answer.s,
                                trace ? &table.s : nullptr);
        keag_model_close(model);
        if (s == KEAG_OK) {
          std::cout << answer.str() << '\n';
          if (trace) std::cout << table.str();
        }
        return Report(s, "generate");
      }
      Owned summary, table;
      keag_status s = keag_generate(config.get(), &summary.s, trace ? &table.s : nullptr);
      if (s == KEAG_OK) {
        if (trace) std::cout << table.str();
        PrintSummary("generate", summary);
      }
      return Report(s, "generate");
    });
  }
  if (*evaluate) {
    Owned report;
    keag_status s = keag_evaluate(predictions.c_str(), references.c_str(), &report.s);
    if (s == KEAG_OK) {
      std::cout << report.str() << '\n';
      if (!report_path.empty()) {
        std::FILE* f = std::fopen(report_path.c_str(), "w");
        if (!f) {
          std::cerr << "keag evaluate: cannot write " << report_path << '\n';
          return KEAG_ERR_DATA;
        }
        std::fputs((report.str() + "\n").c_str(), f);
        std::fclose(f);
      }
    }
    return Report(s, "evaluate");
  }
  if (*synth) {
    Owned summary;
    keag_status s = keag_synth(task.c_str(), size, synth_seed, out_dir.c_str(), &summary.s);
    if (s == KEAG_OK) PrintSummary("synth", summary);
    return Report(s, "synth");
  }
  return KEAG_ERR_CONFIG;
}
