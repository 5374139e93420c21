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

#include <sstream>
#include <string>

#include "doctest.h"
#include "keag/config.hpp"
#include "keag/error.hpp"

using namespace keag;

namespace {

ErrorKind KindOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInvalidArgument;
}

ErrorCategory CategoryOfCall(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected an error");
  return ErrorCategory::kInternal;
}

}  // namespace

TEST_CASE("defaults follow the published settings") {
  RunConfig c;
  CHECK(c.model.emb_dim == 300);
  CHECK(c.model.hidden == 256);
  CHECK(c.model.fact_dim == 500);
  CHECK(c.generate.beam == 4);
  CHECK(c.generate.max_length == 120);
  CHECK(c.data.limits.passage == 800);
  CHECK(c.data.limits.answer == 120);
  CHECK_NOTHROW(c.Validate());
}

TEST_CASE("parsing sections, comments and quoted strings") {
  std::istringstream in(R"(# leading comment
[model]
hidden = 32   # trailing comment
use_knowledge = false

[train]
lr = 0.005
seed = 18446744073709551615

[paths]
kb = "data/kb file.tsv"
)");
  RunConfig c;
  c.Parse(in);
  CHECK(c.model.hidden == 32);
  CHECK_FALSE(c.model.use_knowledge);
  CHECK(c.train.adam.lr == 0.005);
  CHECK(c.train.seed == 18446744073709551615ull);
  CHECK(c.paths.kb == "data/kb file.tsv");
  CHECK(c.model.emb_dim == 300);  // untouched keys keep defaults
}

TEST_CASE("overrides and canonical text round trip") {
  RunConfig c;
  c.Set("train.lr", "0.1");
  c.Set("generate.beam", "1");
  c.Set("paths.checkpoint", "out/m.ckpt");
  c.Set("train.tau_min", "0.30000000000000004");
  CHECK(c.Get("generate.beam") == "1");

  RunConfig d;
  std::istringstream in(c.ToText());
  d.Parse(in);
  CHECK(d.ToText() == c.ToText());
  CHECK(d.train.temperature.minimum == c.train.temperature.minimum);
  for (const std::string& key : c.Keys()) CHECK(d.Get(key) == c.Get(key));
}

TEST_CASE("config errors") {
  RunConfig c;
  CHECK(KindOf([&] { c.Set("train.bogus", "1"); }) == ErrorKind::kConfig);
  CHECK(KindOf([&] { c.Set("model.hidden", "abc"); }) == ErrorKind::kConfig);
  CHECK(KindOf([&] { c.Set("model.hidden", "-3"); }) == ErrorKind::kConfig);
  CHECK(KindOf([&] { c.Set("model.use_knowledge", "maybe"); }) == ErrorKind::kConfig);
  std::istringstream bad("[model]\nhidden 32\n");
  CHECK(KindOf([&] { c.Parse(bad); }) == ErrorKind::kConfig);
  CHECK(KindOf([&] { c.LoadFile("/nonexistent/keag.cfg"); }) == ErrorKind::kConfig);

  RunConfig zero;
  zero.Set("model.hidden", "0");
  CHECK(KindOf([&] { zero.Validate(); }) == ErrorKind::kConfig);
  RunConfig tau;
  tau.Set("train.tau_min", "0");
  CHECK(CategoryOfCall([&] { tau.Validate(); }) == ErrorCategory::kConfig);
}

TEST_CASE("the desk profile loads and validates") {
  RunConfig c;
  c.LoadFile(KEAG_SOURCE_DIR "/configs/desk.cfg");
  CHECK_NOTHROW(c.Validate());
  CHECK(c.model.hidden < 256);
  CHECK(c.train.max_steps <= 2000);
}
