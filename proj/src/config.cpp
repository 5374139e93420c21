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

#include "keag/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "keag/error.hpp"

namespace keag {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string Unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value, const char* want) {
  throw Error(ErrorKind::kConfig, std::string(key) + ": '" + std::string(value) + "' is not " + want);
}

std::size_t ParseSize(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) BadValue(key, v, "a non-negative integer");
  return out;
}

std::uint64_t ParseU64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) BadValue(key, v, "a non-negative integer");
  return out;
}

double ParseDouble(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
    BadValue(key, v, "a finite number");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  BadValue(key, v, "a boolean");
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Member>
Field SizeField(Member member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            member(c) = ParseSize(k, v);
          },
          [member](const RunConfig& c) {
            return std::to_string(member(c));
          }};
}

template <typename Member>
Field DoubleField(Member member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            member(c) = ParseDouble(k, v);
          },
          [member](const RunConfig& c) { return FormatDouble(member(c)); }};
}

template <typename Member>
Field StringField(Member member) {
  return {[member](RunConfig& c, std::string_view, std::string_view v) {
            member(c) = Unquote(std::string(v));
          },
          [member](const RunConfig& c) {
            return "\"" + member(c) + "\"";
          }};
}

// Ordered so that ToText() is canonical.
const std::vector<std::pair<std::string, Field>>& Fields() {
  static const auto* fields = new std::vector<std::pair<std::string, Field>>{
      {"model.emb_dim", SizeField([](auto& c) -> auto& { return c.model.emb_dim; })},
      {"model.hidden", SizeField([](auto& c) -> auto& { return c.model.hidden; })},
      {"model.fact_dim", SizeField([](auto& c) -> auto& { return c.model.fact_dim; })},
      {"model.num_relations",
       SizeField([](auto& c) -> auto& { return c.model.num_relations; })},
      {"model.init_range", DoubleField([](auto& c) -> auto& { return c.model.init_range; })},
      {"model.use_knowledge",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.model.use_knowledge = ParseBool(k, v);
        },
        [](const RunConfig& c) { return std::string(c.model.use_knowledge ? "true" : "false"); }}},
      {"data.vocab_size", SizeField([](auto& c) -> auto& { return c.data.vocab_size; })},
      {"data.min_count", SizeField([](auto& c) -> auto& { return c.data.min_count; })},
      {"data.max_facts", SizeField([](auto& c) -> auto& { return c.data.max_facts; })},
      {"data.max_passage",
       SizeField([](auto& c) -> auto& { return c.data.limits.passage; })},
      {"data.max_answer", SizeField([](auto& c) -> auto& { return c.data.limits.answer; })},
      {"train.batch_size", SizeField([](auto& c) -> auto& { return c.train.batch_size; })},
      {"train.max_steps", SizeField([](auto& c) -> auto& { return c.train.max_steps; })},
      {"train.lr", DoubleField([](auto& c) -> auto& { return c.train.adam.lr; })},
      {"train.beta1", DoubleField([](auto& c) -> auto& { return c.train.adam.beta1; })},
      {"train.beta2", DoubleField([](auto& c) -> auto& { return c.train.adam.beta2; })},
      {"train.clip_norm", DoubleField([](auto& c) -> auto& { return c.train.clip_norm; })},
      {"train.coverage_weight",
       DoubleField([](auto& c) -> auto& { return c.train.loss.coverage_weight; })},
      {"train.mc_samples",
       SizeField([](auto& c) -> auto& { return c.train.loss.mc_samples; })},
      {"train.tau_initial",
       DoubleField([](auto& c) -> auto& { return c.train.temperature.initial; })},
      {"train.tau_rate", DoubleField([](auto& c) -> auto& { return c.train.temperature.rate; })},
      {"train.tau_min",
       DoubleField([](auto& c) -> auto& { return c.train.temperature.minimum; })},
      {"train.seed",
       {[](RunConfig& c, std::string_view k, std::string_view v) { c.train.seed = ParseU64(k, v); },
        [](const RunConfig& c) { return std::to_string(c.train.seed); }}},
      {"train.log_every", SizeField([](auto& c) -> auto& { return c.log_every; })},
      {"generate.beam", SizeField([](auto& c) -> auto& { return c.generate.beam; })},
      {"generate.max_length",
       SizeField([](auto& c) -> auto& { return c.generate.max_length; })},
      {"paths.train", StringField([](auto& c) -> auto& { return c.paths.train; })},
      {"paths.eval", StringField([](auto& c) -> auto& { return c.paths.eval; })},
      {"paths.kb", StringField([](auto& c) -> auto& { return c.paths.kb; })},
      {"paths.vocab", StringField([](auto& c) -> auto& { return c.paths.vocab; })},
      {"paths.embeddings", StringField([](auto& c) -> auto& { return c.paths.embeddings; })},
      {"paths.checkpoint", StringField([](auto& c) -> auto& { return c.paths.checkpoint; })},
      {"paths.metrics_log",
       StringField([](auto& c) -> auto& { return c.paths.metrics_log; })},
      {"paths.output", StringField([](auto& c) -> auto& { return c.paths.output; })},
  };
  return *fields;
}

const Field& Lookup(std::string_view key) {
  for (const auto& [name, field] : Fields()) {
    if (name == key) return field;
  }
  throw Error(ErrorKind::kConfig, "unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::Set(std::string_view key, std::string_view value) {
  Lookup(key).set(*this, key, Trim(value));
}

std::string RunConfig::Get(std::string_view key) const { return Lookup(key).get(*this); }

std::vector<std::string> RunConfig::Keys() const {
  std::vector<std::string> keys;
  for (const auto& [name, field] : Fields()) keys.push_back(name);
  return keys;
}

void RunConfig::Parse(std::istream& in, const std::string& origin) {
  std::string line, section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string text = Trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (text.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (text.front() == '[') {
      if (text.back() != ']') throw Error(ErrorKind::kConfig, where + ": malformed section header");
      section = Trim(std::string_view(text).substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kConfig, where + ": expected key = value");
    const std::string key = Trim(std::string_view(text).substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    try {
      Set(full, std::string_view(text).substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, where + ": " + e.what());
    }
  }
}

void RunConfig::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read config file " + path);
  Parse(in, path);
}

std::string RunConfig::ToText() const {
  std::ostringstream out;
  std::string section;
  for (const auto& [name, field] : Fields()) {
    const auto dot = name.find('.');
    const std::string s = name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << name.substr(dot + 1) << " = " << field.get(*this) << '\n';
  }
  return out.str();
}

void RunConfig::Validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw Error(ErrorKind::kConfig, std::string(name) + " must be positive");
  };
  positive(model.emb_dim, "model.emb_dim");
  positive(model.hidden, "model.hidden");
  positive(model.fact_dim, "model.fact_dim");
  positive(model.num_relations, "model.num_relations");
  positive(data.vocab_size, "data.vocab_size");
  positive(data.max_facts, "data.max_facts");
  positive(data.limits.passage, "data.max_passage");
  positive(data.limits.answer, "data.max_answer");
  positive(train.batch_size, "train.batch_size");
  positive(train.loss.mc_samples, "train.mc_samples");
  positive(generate.beam, "generate.beam");
  positive(generate.max_length, "generate.max_length");
  if (data.vocab_size <= Vocabulary::kNumSpecials) {
    throw Error(ErrorKind::kConfig, "data.vocab_size must exceed the 4 special tokens");
  }
  if (!(train.adam.lr >= 0.0)) throw Error(ErrorKind::kConfig, "train.lr must be non-negative");
  if (!(model.init_range > 0.0)) throw Error(ErrorKind::kConfig, "model.init_range must be positive");
  AnnealTemperature(0, train.temperature);
}

}  // namespace keag
