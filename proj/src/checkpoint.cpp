// Copyright 2026 The hyqut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hyqut/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hyqut/error.hpp"

namespace hyqut::checkpoint {

namespace {

constexpr char kMagic[8] = {'H', 'Y', 'Q', 'U', 'T', 'C', 'K', 'P'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i)
      buf_.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }
  void put_float(float f) { put(std::bit_cast<std::uint32_t>(f)); }
  void put_bytes(std::string_view s) { buf_.append(s); }
  void put_string64(std::string_view s) {
    put<std::uint64_t>(s.size());
    put_bytes(s);
  }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& buf, std::size_t end) : buf_(buf), end_(end) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  float get_float() { return std::bit_cast<float>(get<std::uint32_t>()); }
  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string get_string64() { return get_bytes(get<std::uint64_t>()); }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) throw IoError("checkpoint is truncated");
  }
  const std::string& buf_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

Tensor to_tensor(const std::vector<std::size_t>& shape, const std::vector<double>& values) {
  Tensor t;
  t.shape = shape;
  t.values.reserve(values.size());
  for (double v : values) t.values.push_back(static_cast<float>(v));
  return t;
}

void copy_into(const Checkpoint& ckpt, const std::string& name,
               const std::vector<std::size_t>& shape, std::vector<double>& dst) {
  auto it = ckpt.tensors.find(name);
  if (it == ckpt.tensors.end()) throw IoError("checkpoint lacks tensor " + name);
  if (it->second.shape != shape)
    throw IoError("checkpoint tensor " + name + " has shape " + shape_string(it->second.shape) +
                  ", expected " + shape_string(shape));
  dst.assign(it->second.values.begin(), it->second.values.end());
}

}  // namespace

Checkpoint capture(Model& model, const train::AdamState& state, const Config& config,
                   const std::string& vocabulary, std::uint64_t step) {
  Checkpoint c;
  c.config_text = config.to_text();
  c.vocabulary = vocabulary;
  c.step = step;
  c.adam_t = state.t;
  const auto params = model.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Param& p = *params[k];
    c.tensors[p.name] = to_tensor(p.shape, p.value);
    if (state.t > 0) {
      c.tensors["adam.m." + p.name] = to_tensor(p.shape, state.m.at(k));
      c.tensors["adam.v." + p.name] = to_tensor(p.shape, state.v.at(k));
    }
  }
  return c;
}

void save(const Checkpoint& ckpt, const std::filesystem::path& path) {
  Writer w;
  w.put_bytes(std::string_view(kMagic, sizeof kMagic));
  w.put<std::uint32_t>(kVersion);
  w.put_string64(ckpt.config_text);
  w.put_string64(ckpt.vocabulary);
  w.put<std::uint64_t>(ckpt.step);
  w.put<std::uint64_t>(ckpt.adam_t);
  w.put<std::uint64_t>(ckpt.tensors.size());
  for (const auto& [name, t] : ckpt.tensors) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.put_bytes(name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.put<std::uint64_t>(d);
    for (float f : t.values) w.put_float(f);
  }
  w.put<std::uint64_t>(fnv1a(w.bytes()));

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw IoError("failed writing checkpoint " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();
  if (buf.size() < sizeof kMagic + 4 + 8 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
    throw IoError(path.string() + " is not a hyqut checkpoint");

  const std::size_t body = buf.size() - 8;
  Reader tail(buf, buf.size());
  (void)tail.get_bytes(body);
  if (tail.get<std::uint64_t>() != fnv1a(buf.substr(0, body)))
    throw IoError("checkpoint " + path.string() + " is corrupt (checksum mismatch)");

  Reader r(buf, body);
  (void)r.get_bytes(sizeof kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw IoError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                  std::to_string(kVersion) + ")");
  Checkpoint c;
  c.config_text = r.get_string64();
  c.vocabulary = r.get_string64();
  c.step = r.get<std::uint64_t>();
  c.adam_t = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.get_bytes(r.get<std::uint32_t>());
    Tensor t;
    const auto rank = r.get<std::uint32_t>();
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
      n *= t.shape.back();
    }
    if (n > body) throw IoError("checkpoint tensor " + name + " has an impossible shape");
    t.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) t.values.push_back(r.get_float());
    c.tensors.emplace(std::move(name), std::move(t));
  }
  if (!r.done()) throw IoError("checkpoint has trailing bytes");
  return c;
}

void restore(const Checkpoint& ckpt, const Config& current, Model& model,
             train::AdamState& state) {
  Config stored;
  try {
    stored = Config::parse(ckpt.config_text);
  } catch (const ConfigError& e) {
    throw IoError(std::string("checkpoint carries an unreadable config: ") + e.what());
  }
  auto diff = architecture_diff(stored, current);
  if (!diff.empty()) {
    std::string msg = "checkpoint config disagrees with the current config:";
    for (const auto& d : diff) msg += "\n  " + d;
    throw ConfigError(msg);
  }
  const auto params = model.parameters();
  state = train::AdamState{};
  state.t = ckpt.adam_t;
  for (Param* p : params) {
    copy_into(ckpt, p->name, p->shape, p->value);
    if (ckpt.adam_t > 0) {
      state.m.emplace_back();
      state.v.emplace_back();
      copy_into(ckpt, "adam.m." + p->name, p->shape, state.m.back());
      copy_into(ckpt, "adam.v." + p->name, p->shape, state.v.back());
    }
  }
}

}  // namespace hyqut::checkpoint
