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

#include <cmath>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "keag/error.hpp"
#include "keag/selectors.hpp"
#include "stats.hpp"

using namespace keag;
using keag::ad::Tape;
using keag::ad::Tensor;
using keag::ad::Var;
namespace o = keag::oracle;

namespace {

constexpr std::size_t kEmb = 3;
constexpr std::size_t kHid = 4;

Vocabulary SmallVocab() {
  return Vocabulary::FromTokens({"<pad>", "<unk>", "<s>", "</s>", "obama", "cross",
                                 "water", "bridge", "personality", "disorder"});
}

double Sum(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v;
  return s;
}

FactParams RandomFactParams(Tape& tape, Rng& rng, std::size_t relations, std::size_t fact_dim) {
  return {tape.constant(o::RandomTensor(rng, {relations, kEmb})),
          tape.constant(o::RandomTensor(rng, {3 * kEmb, fact_dim})),
          tape.constant(o::RandomTensor(rng, {fact_dim})),
          tape.constant(o::RandomTensor(rng, {fact_dim, kHid})),
          tape.constant(o::RandomTensor(rng, {kHid, kHid})),
          tape.constant(o::RandomTensor(rng, {kHid})),
          tape.constant(o::RandomTensor(rng, {kHid}))};
}

}  // namespace

TEST_CASE("vocabulary distribution") {
  Rng rng(1);
  const std::size_t v = 10;
  SUBCASE("zero weights give a uniform distribution") {
    Tape tape;
    VocabParams p{tape.constant(Tensor({5 * kHid, v}, 0.0)), tape.constant(Tensor({v}, 0.0))};
    const Tensor& d = VocabDistribution(tape.constant(o::RandomTensor(rng, {2 * kHid})),
                                        tape.constant(o::RandomTensor(rng, {2 * kHid})),
                                        tape.constant(o::RandomTensor(rng, {kHid})), p)
                          .value();
    for (double x : d.data()) CHECK(x == doctest::Approx(0.1).epsilon(1e-14));
  }
  SUBCASE("random instances match the transcription and sum to one") {
    for (int trial = 0; trial < 20; ++trial) {
      Tape tape;
      Tensor w = o::RandomTensor(rng, {5 * kHid, v});
      Tensor b = o::RandomTensor(rng, {v});
      Tensor cq = o::RandomTensor(rng, {2 * kHid});
      Tensor cp = o::RandomTensor(rng, {2 * kHid});
      Tensor s = o::RandomTensor(rng, {kHid});
      const Tensor& d = VocabDistribution(tape.constant(cq), tape.constant(cp), tape.constant(s),
                                          {tape.constant(w), tape.constant(b)})
                            .value();
      const o::Vec want = o::Softmax(o::Add(
          o::VecMat(o::Concat({o::ToVec(cq), o::ToVec(cp), o::ToVec(s)}), o::ToMat(w)),
          o::ToVec(b)));
      CHECK(std::abs(Sum(d) - 1.0) < 1e-9);
      for (std::size_t i = 0; i < v; ++i) CHECK(d[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("source distribution") {
  Rng rng(2);
  const std::size_t in = 5 * kHid + kEmb;
  auto inputs = [&](Tape& tape) {
    return std::vector<Var>{tape.constant(o::RandomTensor(rng, {2 * kHid})),
                            tape.constant(o::RandomTensor(rng, {2 * kHid})),
                            tape.constant(o::RandomTensor(rng, {kHid})),
                            tape.constant(o::RandomTensor(rng, {kEmb}))};
  };
  SUBCASE("zero parameters give a uniform selector") {
    Tape tape;
    auto x = inputs(tape);
    SourceParams p{tape.constant(Tensor({in, 4}, 0.0)), tape.constant(Tensor({4}, 0.0))};
    for (double v : SourceDistribution(x[0], x[1], x[2], x[3], p, true).value().data())
      CHECK(v == 0.25);
  }
  SUBCASE("knowledge is masked and the rest renormalized without facts") {
    Tape tape;
    auto x = inputs(tape);
    Tensor w = o::RandomTensor(rng, {in, 4});
    Tensor b = o::RandomTensor(rng, {4});
    SourceParams p{tape.constant(w), tape.constant(b)};
    const Tensor full = SourceDistribution(x[0], x[1], x[2], x[3], p, true).value();
    const Tensor& masked = SourceDistribution(x[0], x[1], x[2], x[3], p, false).value();
    CHECK(masked[3] == 0.0);
    const double rest = full[0] + full[1] + full[2];
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(masked[i] == doctest::Approx(full[i] / rest).epsilon(1e-12));
    CHECK(std::abs(Sum(masked) - 1.0) < 1e-9);
  }
  SUBCASE("random instances match the transcription") {
    for (int trial = 0; trial < 20; ++trial) {
      Tape tape;
      auto x = inputs(tape);
      Tensor w = o::RandomTensor(rng, {in, 4});
      Tensor b = o::RandomTensor(rng, {4});
      const Tensor& d =
          SourceDistribution(x[0], x[1], x[2], x[3], {tape.constant(w), tape.constant(b)}, true)
              .value();
      const o::Vec feats = o::Concat({o::ToVec(x[0].value()), o::ToVec(x[1].value()),
                                      o::ToVec(x[2].value()), o::ToVec(x[3].value())});
      const o::Vec want = o::Softmax(o::Add(o::VecMat(feats, o::ToMat(w)), o::ToVec(b)));
      for (std::size_t i = 0; i < 4; ++i) CHECK(d[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("per-source word distributions") {
  const Vocabulary vocab = SmallVocab();
  const Tokens question = {"obama", "obama"};
  const Tokens passage = {"the", "bridge", "is", "long"};
  const double aq[] = {0.6, 0.4};
  const double ap[] = {0.1, 0.2, 0.3, 0.4};
  std::vector<double> pv(vocab.size(), 0.0);
  pv[vocab.id("water")] = 0.75;
  pv[vocab.id("<unk>")] = 0.25;
  const Tokens obj1 = {"personality", "disorder"};
  const Tokens obj2 = {"cross", "water"};
  const Tokens obj3 = {"personality", "trait"};
  const Tokens* objects[] = {&obj1, &obj2, &obj3};
  const double fw[] = {0.3, 0.2, 0.5};

  SourceInputs in;
  in.question = question;
  in.passage = passage;
  in.question_attention = aq;
  in.passage_attention = ap;
  in.vocab_probs = pv;
  in.vocab = &vocab;
  in.fact_weights = fw;
  in.fact_objects = objects;

  SUBCASE("question copy aggregates duplicates") {
    auto d = SourceWordDistribution(Source::kQuestion, in);
    REQUIRE(d.size() == 1);
    CHECK(d[0].token == "obama");
    CHECK(d[0].prob == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(SourceWordProbability(Source::kQuestion, "obama", in) == doctest::Approx(1.0));
    CHECK(SourceWordProbability(Source::kQuestion, "bridge", in) == 0.0);
  }
  SUBCASE("passage copy with distinct tokens is the attention itself") {
    auto d = SourceWordDistribution(Source::kPassage, in);
    REQUIRE(d.size() == 4);
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(d[i].token == passage[i]);
      CHECK(d[i].prob == ap[i]);
      total += d[i].prob;
    }
    CHECK(total == doctest::Approx(1.0));
  }
  SUBCASE("vocabulary source cannot emit unknown surface forms") {
    CHECK(SourceWordProbability(Source::kVocabulary, "water", in) == 0.75);
    CHECK(SourceWordProbability(Source::kVocabulary, "qqqzz7", in) == 0.0);
    CHECK(SourceWordDistribution(Source::kVocabulary, in).size() == vocab.size());
  }
  SUBCASE("knowledge emits the first object token") {
    auto d = SourceWordDistribution(Source::kKnowledge, in);
    REQUIRE(d.size() == 2);
    CHECK(d[0].token == "personality");
    CHECK(d[0].prob == doctest::Approx(0.8));
    CHECK(d[0].fact_index == 2);  // most probable fact starting with the token
    CHECK(d[1].token == "cross");
    CHECK(d[1].fact_index == 1);
    CHECK(SourceWordProbability(Source::kKnowledge, "personality", in) == doctest::Approx(0.8));
    CHECK(SourceWordProbability(Source::kKnowledge, "disorder", in) == 0.0);
  }
  SUBCASE("a single fully weighted fact") {
    const Tokens* one[] = {&obj1};
    const double w1[] = {1.0};
    in.fact_objects = one;
    in.fact_weights = w1;
    auto d = SourceWordDistribution(Source::kKnowledge, in);
    REQUIRE(d.size() == 1);
    CHECK(d[0].token == "personality");
    CHECK(d[0].prob == 1.0);
  }
  SUBCASE("invalid source") {
    CHECK_THROWS_AS(SourceWordDistribution(static_cast<Source>(7), in), Error);
    try {
      SourceWordProbability(static_cast<Source>(-1), "x", in);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInvalidSource);
    }
  }
}

TEST_CASE("fact embedding") {
  const Vocabulary vocab = SmallVocab();
  Rng rng(3);
  Tape tape;
  Tensor table = o::RandomTensor(rng, {vocab.size(), kEmb});
  Var emb = tape.constant(table);
  Tensor rel = o::RandomTensor(rng, {32, kEmb});
  Var relations = tape.constant(rel);

  SUBCASE("single-word subject and object are raw word vectors") {
    Fact f{{"bridge"}, 5, {"water"}, 0};
    const Tensor& x = FactFeatures(f, vocab, emb, relations).value();
    for (std::size_t k = 0; k < kEmb; ++k) {
      CHECK(x[k] == doctest::Approx(table.at(vocab.id("bridge"), k)).epsilon(1e-15));
      CHECK(x[kEmb + k] == rel.at(5, k));
      CHECK(x[2 * kEmb + k] == doctest::Approx(table.at(vocab.id("water"), k)).epsilon(1e-15));
    }
  }
  SUBCASE("multi-word objects are average pooled") {
    Fact f{{"bridge"}, 0, {"cross", "water"}, 0};
    const Tensor& x = FactFeatures(f, vocab, emb, relations).value();
    for (std::size_t k = 0; k < kEmb; ++k) {
      const double mean = 0.5 * (table.at(vocab.id("cross"), k) + table.at(vocab.id("water"), k));
      CHECK(x[2 * kEmb + k] == doctest::Approx(mean).epsilon(1e-14));
    }
  }
  SUBCASE("unknown object words use the unknown row") {
    Fact f{{"bridge"}, 0, {"qqqzz7"}, 0};
    const Tensor& x = FactFeatures(f, vocab, emb, relations).value();
    for (std::size_t k = 0; k < kEmb; ++k) CHECK(x[2 * kEmb + k] == table.at(Vocabulary::kUnk, k));
  }
  SUBCASE("zero projection gives a zero representation") {
    FactParams p{relations, tape.constant(Tensor({3 * kEmb, 6}, 0.0)),
                 tape.constant(Tensor({6}, 0.0)), Var{}, Var{}, Var{}, Var{}};
    Fact f{{"obama"}, 3, {"personality", "disorder"}, 0};
    for (double v : EmbedFact(f, vocab, emb, p).value().data()) CHECK(v == 0.0);
  }
  SUBCASE("batched embedding equals per-fact embedding") {
    FactParams p = RandomFactParams(tape, rng, 32, 6);
    p.relations = relations;
    Fact a{{"obama"}, 3, {"personality", "disorder"}, 0};
    Fact b{{"bridge"}, 1, {"cross", "water"}, 1};
    const Fact* both[] = {&a, &b};
    const Tensor& all = EmbedFacts(both, vocab, emb, p).value();
    const Tensor& ea = EmbedFact(a, vocab, emb, p).value();
    const Tensor& eb = EmbedFact(b, vocab, emb, p).value();
    CHECK(all.shape() == ad::Shape{2, 6});
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(all.at(0, k) == doctest::Approx(ea[k]).epsilon(1e-14));
      CHECK(all.at(1, k) == doctest::Approx(eb[k]).epsilon(1e-14));
    }
    CHECK_THROWS_AS(EmbedFacts(std::span<const Fact* const>{}, vocab, emb, p), Error);
  }
  SUBCASE("relation ids beyond the table are rejected") {
    Fact f{{"bridge"}, 32, {"water"}, 0};
    CHECK_THROWS_AS(FactFeatures(f, vocab, emb, relations), Error);
  }
}

TEST_CASE("fact distribution") {
  Rng rng(4);
  const std::size_t fd = 5;
  SUBCASE("identical facts are uniform") {
    Tape tape;
    FactParams p = RandomFactParams(tape, rng, 4, fd);
    Tensor reps({3, fd}, 0.0);
    const Tensor one = o::RandomTensor(rng, {fd});
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < fd; ++c) reps.at(r, c) = one[c];
    Var keys = PrepareFactKeys(tape.constant(reps), p);
    for (double v : FactDistribution(keys, tape.constant(o::RandomTensor(rng, {kHid})), p).value().data())
      CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("a single fact has all the mass") {
    Tape tape;
    FactParams p = RandomFactParams(tape, rng, 4, fd);
    Var keys = PrepareFactKeys(tape.constant(o::RandomTensor(rng, {1, fd})), p);
    CHECK(FactDistribution(keys, tape.constant(o::RandomTensor(rng, {kHid})), p).value()[0] == 1.0);
  }
  SUBCASE("random instances match the transcription") {
    for (int trial = 0; trial < 20; ++trial) {
      Tape tape;
      FactParams p = RandomFactParams(tape, rng, 4, fd);
      const std::size_t n = 1 + rng.below(8);
      Tensor reps = o::RandomTensor(rng, {n, fd});
      Tensor s = o::RandomTensor(rng, {kHid});
      const Tensor& d = FactDistribution(PrepareFactKeys(tape.constant(reps), p),
                                         tape.constant(s), p).value();
      const o::Vec query = o::VecMat(o::ToVec(s), o::ToMat(p.w_decoder.value()));
      const o::Vec want = o::Attention(o::ToMat(reps), o::ToMat(p.w_fact.value()),
                                       o::ToVec(p.bias.value()), query, o::Vec(kHid, 0.0),
                                       o::Vec(n, 0.0), o::ToVec(p.g.value()));
      CHECK(std::abs(Sum(d) - 1.0) < 1e-9);
      for (std::size_t i = 0; i < n; ++i) CHECK(d[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
  SUBCASE("argmax is invariant to shifting every logit") {
    for (int trial = 0; trial < 20; ++trial) {
      Tape tape;
      FactParams p = RandomFactParams(tape, rng, 4, fd);
      Tensor reps = o::RandomTensor(rng, {6, fd});
      Var s = tape.constant(o::RandomTensor(rng, {kHid}));
      const Tensor base = FactDistribution(PrepareFactKeys(tape.constant(reps), p), s, p).value();
      // A constant added to the logits: g . tanh(.) + c, via a shifted softmax input.
      Var logits = matmul(tanh(add(PrepareFactKeys(tape.constant(reps), p),
                                   matmul(s, p.w_decoder))), p.g);
      const Tensor shifted =
          softmax(logits + tape.constant(Tensor({6}, rng.uniform(-50.0, 50.0)))).value();
      auto argmax = [](const Tensor& t) {
        return std::max_element(t.data().begin(), t.data().end()) - t.data().begin();
      };
      CHECK(argmax(base) == argmax(shifted));
    }
  }
  SUBCASE("an empty fact set is rejected") {
    Tape tape;
    FactParams p = RandomFactParams(tape, rng, 4, fd);
    try {
      FactDistribution(tape.constant(Tensor({kHid}, 0.0)), tape.constant(Tensor({kHid}, 0.0)), p);
      FAIL("expected EmptyFactSet");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kEmptyFactSet);
    }
  }
}

TEST_CASE("gumbel-max law") {
  Rng rng(5);
  const double pi[] = {0.7, 0.2, 0.1};
  std::size_t counts[3] = {0, 0, 0};
  for (int i = 0; i < 100000; ++i) ++counts[GumbelSoftmaxSample(pi, 1.0, rng).hard_index];
  const o::FitReport fit = o::Fit(counts, pi);
  CHECK(fit.total_variation < 0.01);
  CHECK(fit.p_value > 0.001);
}

TEST_CASE("gumbel-softmax samples") {
  Rng rng(6);
  SUBCASE("soft sample is a simplex and hard index is its argmax") {
    const double pi[] = {0.1, 0.3, 0.05, 0.55};
    for (int i = 0; i < 1000; ++i) {
      GumbelSample s = GumbelSoftmaxSample(pi, rng.uniform(0.05, 2.0), rng);
      double total = 0.0;
      for (double v : s.soft) total += v;
      CHECK(std::abs(total - 1.0) < 1e-12);
      CHECK(std::max_element(s.soft.begin(), s.soft.end()) - s.soft.begin() ==
            static_cast<std::ptrdiff_t>(s.hard_index));
    }
  }
  SUBCASE("low temperature is nearly one-hot") {
    // For two equal classes the max entry exceeds 0.99 exactly when the
    // logistic noise difference exceeds tau * ln 99.
    const double pi[] = {0.5, 0.5};
    auto sharp_rate = [&](double tau) {
      int sharp = 0;
      for (int i = 0; i < 20000; ++i) {
        GumbelSample s = GumbelSoftmaxSample(pi, tau, rng);
        if (std::max(s.soft[0], s.soft[1]) > 0.99) ++sharp;
      }
      return sharp / 20000.0;
    };
    auto expected = [](double tau) {
      return 2.0 - 2.0 / (1.0 + std::exp(-tau * std::log(99.0)));
    };
    CHECK(sharp_rate(0.01) == doctest::Approx(expected(0.01)).epsilon(0.005));
    CHECK(expected(0.01) < 0.99);
    CHECK(sharp_rate(0.004) > 0.99);
  }
  SUBCASE("one-hot probabilities always pick that index") {
    const double pi[] = {0.0, 0.0, 1.0, 0.0};
    for (int i = 0; i < 5000; ++i) CHECK(GumbelSoftmaxSample(pi, 1.0, rng).hard_index == 2);
  }
  SUBCASE("shrinking temperature on fixed noise approaches the hard one-hot") {
    const double pi[] = {0.2, 0.3, 0.5};
    double prev = 0.0;
    for (double tau : {1.0, 0.3, 0.1, 0.03, 0.01}) {
      Rng fixed(99);
      GumbelSample s = GumbelSoftmaxSample(pi, tau, fixed);
      CHECK(s.soft[s.hard_index] >= prev);
      prev = s.soft[s.hard_index];
    }
    CHECK(prev > 0.99);
  }
  SUBCASE("degenerate inputs") {
    const double zeros[] = {0.0, 1e-13};
    const double pi[] = {0.5, 0.5};
    try {
      GumbelSoftmaxSample(zeros, 1.0, rng);
      FAIL("expected DegenerateDistribution");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDegenerateDistribution);
    }
    CHECK_THROWS_AS(GumbelSoftmaxSample(pi, 0.0, rng), Error);
  }
  SUBCASE("tape and plain samplers agree under the same generator state") {
    const double pi[] = {0.25, 0.15, 0.6};
    Rng a(7), b(7);
    Tape tape;
    GumbelVar v = GumbelSoftmax(tape.constant(Tensor::Vector({0.25, 0.15, 0.6})), 0.4, a);
    GumbelSample s = GumbelSoftmaxSample(pi, 0.4, b);
    CHECK(v.hard_index == s.hard_index);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(v.soft.value()[i] == doctest::Approx(s.soft[i]).epsilon(1e-13));
  }
}

TEST_CASE("gumbel-softmax gradient matches finite differences at fixed noise") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor logits = o::RandomTensor(rng, {5}, 2.0);
    const std::uint64_t seed = rng.next_u64();
    const double tau = rng.uniform(0.2, 1.5);
    Tensor weights = o::RandomTensor(rng, {5});
    auto f = [&](Tape& tape, Var x) {
      Rng noise(seed);  // same noise on every evaluation
      GumbelVar g = GumbelSoftmax(softmax(x), tau, noise);
      return sum(g.soft * tape.constant(weights));
    };
    ad::GradientCheckReport r = ad::gradient_check(f, logits);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("temperature annealing") {
  TemperatureSchedule s;
  CHECK(AnnealTemperature(0, s) == 1.0);
  CHECK(AnnealTemperature(10000, s) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(AnnealTemperature(10000, s) == doctest::Approx(0.3679).epsilon(1e-4));
  CHECK(AnnealTemperature(100000000, s) == 0.1);
  double prev = 2.0;
  for (std::size_t step = 0; step < 50000; step += 997) {
    const double t = AnnealTemperature(step, s);
    CHECK(t <= prev);
    prev = t;
  }
  try {
    AnnealTemperature(0, {1.0, 1e-4, 0.0});
    FAIL("expected InvalidSchedule");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidSchedule);
  }
}
