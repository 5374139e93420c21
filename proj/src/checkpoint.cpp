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

#include "keag/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "keag/error.hpp"
#include "keag/text.hpp"

namespace keag {

namespace {

constexpr char kMagic[8] = {'K', 'E', 'A', 'G', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { out_.append(s); }
  void str(std::string_view s) {
    u64(s.size());
    bytes(s);
  }
  std::string take() { return std::move(out_); }
  const std::string& data() const { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& data, std::size_t end) : data_(data), end_(end) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::uint64_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string str() { return bytes(u64()); }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::uint64_t n) const {
    if (n > end_ - pos_) throw Error(ErrorKind::kCorruptFile, "checkpoint is truncated");
  }
  std::uint64_t le(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += n;
    return v;
  }
  const std::string& data_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(std::string_view(kMagic, sizeof(kMagic)));
  w.u32(Checkpoint::kVersion);
  w.u64(c.step);
  w.u64(c.vocab_hash);
  w.str(c.config_text);
  w.u64(c.params.size());
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    const ad::Tensor& t = c.params.value(i);
    w.str(c.params.name(i));
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t e : t.shape()) w.u64(e);
    for (double v : t.data()) w.f64(v);
  }
  const std::uint64_t checksum = Fnv1a64(w.data());
  w.u64(checksum);
  return w.take();
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path) {
  const std::string bytes = SerializeCheckpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write checkpoint " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing checkpoint " + path);
}

Checkpoint ParseCheckpoint(const std::string& bytes,
                           std::optional<std::uint64_t> expected_vocab_hash) {
  if (bytes.size() < sizeof(kMagic) + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kCorruptFile, "not a checkpoint file");
  }
  const std::size_t body = bytes.size() - 8;
  Reader trailer(bytes, bytes.size());
  trailer.bytes(body);
  if (trailer.u64() != Fnv1a64(std::string_view(bytes.data(), body))) {
    throw Error(ErrorKind::kCorruptFile, "checkpoint checksum mismatch");
  }

  Reader r(bytes, body);
  r.bytes(sizeof(kMagic));
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion) {
    throw Error(ErrorKind::kVersionMismatch,
                "checkpoint version " + std::to_string(version) + ", expected " +
                    std::to_string(Checkpoint::kVersion));
  }
  Checkpoint c;
  c.step = r.u64();
  c.vocab_hash = r.u64();
  if (expected_vocab_hash && *expected_vocab_hash != c.vocab_hash) {
    throw Error(ErrorKind::kVersionMismatch,
                "checkpoint was trained with a different vocabulary");
  }
  c.config_text = r.str();
  const std::uint64_t count = r.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank < 1 || rank > 2) throw Error(ErrorKind::kCorruptFile, "bad tensor rank in " + name);
    ad::Shape shape(rank);
    for (auto& e : shape) {
      e = r.u64();
      if (e == 0 || e > (std::uint64_t{1} << 32)) {
        throw Error(ErrorKind::kCorruptFile, "bad extent in " + name);
      }
    }
    ad::Tensor t(shape, 0.0);
    for (double& v : t.data()) v = r.f64();
    c.params.Add(std::move(name), std::move(t));
  }
  if (!r.done()) throw Error(ErrorKind::kCorruptFile, "trailing bytes in checkpoint");
  return c;
}

Checkpoint LoadCheckpoint(const std::string& path,
                          std::optional<std::uint64_t> expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open checkpoint " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCheckpoint(buf.str(), expected_vocab_hash);
}

ModelConfig InferModelConfig(const ParameterStore& params) {
  for (const char* name : {"embeddings", "dec.w_hidden", "fact.w_embed", "fact.relations"}) {
    if (!params.contains(name)) {
      throw Error(ErrorKind::kVersionMismatch, std::string("checkpoint lacks ") + name);
    }
  }
  ModelConfig c;
  c.vocab_size = params.value("embeddings").rows();
  c.emb_dim = params.value("embeddings").cols();
  c.hidden = params.value("dec.w_hidden").rows();
  c.fact_dim = params.value("fact.w_embed").cols();
  c.num_relations = params.value("fact.relations").rows();
  return c;
}

}  // namespace keag
