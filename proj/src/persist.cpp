#include "lexblend/persist.hpp"

#include <unistd.h>
#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "lexblend/errors.hpp"

namespace lexblend {

const ModelParams& ParamStore::for_config(int config_id) const {
  auto it = configs.find(config_id);
  return it == configs.end() ? base : it->second;
}

namespace {

constexpr std::array<char, 8> kMagic{'L', 'E', 'X', 'B', 'L', 'E', 'N', 'D'};

constexpr std::uint32_t fourcc(const char (&s)[5]) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}

constexpr std::uint32_t kConf = fourcc("CONF");
constexpr std::uint32_t kVocab = fourcc("VOCB");
constexpr std::uint32_t kGraphs = fourcc("GRPH");
constexpr std::uint32_t kSrt = fourcc("SRTB");
constexpr std::uint32_t kParams = fourcc("PARM");
constexpr std::array<std::uint32_t, 5> kSectionOrder{kConf, kVocab, kGraphs, kSrt, kParams};

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    const auto b = take(n);
    return std::string(b.begin(), b.end());
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > data_.size() - pos_) throw CorruptModel("model file is truncated");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  // Guards element counts read from the file against the bytes left.
  void expect(std::uint64_t count, std::size_t element_size) const {
    if (element_size != 0 && count > (data_.size() - pos_) / element_size)
      throw CorruptModel("section count exceeds its payload");
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::span<const std::uint8_t> payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in pieces
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < payload.size(); off += kChunk) {
    const std::size_t n = std::min(kChunk, payload.size() - off);
    crc = crc32(crc, payload.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

void write_params(Writer& w, const ModelParams& p) {
  w.f64(p.alpha);
  w.f64(p.eta_alpha);
  w.f64(p.eta_lambda);
  w.u32(static_cast<std::uint32_t>(p.lambda_before.size()));
  for (const double l : p.lambda_before) w.f64(l);
  w.u32(static_cast<std::uint32_t>(p.lambda_after.size()));
  for (const double l : p.lambda_after) w.f64(l);
}

ModelParams read_params(Reader& r) {
  ModelParams p;
  p.alpha = r.f64();
  p.eta_alpha = r.f64();
  p.eta_lambda = r.f64();
  const auto nb = r.u32();
  r.expect(nb, 8);
  p.lambda_before.resize(nb);
  for (auto& l : p.lambda_before) l = r.f64();
  const auto na = r.u32();
  r.expect(na, 8);
  p.lambda_after.resize(na);
  for (auto& l : p.lambda_after) l = r.f64();
  return p;
}

std::vector<std::uint8_t> conf_section(const Model& m) {
  Writer w;
  w.u64(m.config.max_distance);
  w.u64(m.config.svd_rank);
  w.u32(m.config.min_nonstop);
  w.f64(m.config.epsilon);
  w.u64(m.config.svd_seed);
  w.u64(m.sentence_count);
  w.u64(m.qualifying_sentences);
  w.str(m.fingerprint);
  return std::move(w.buffer());
}

std::vector<std::uint8_t> vocab_section(const Vocabulary& v) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    w.str(v.words()[i]);
    w.u64(v.counts()[i]);
  }
  return std::move(w.buffer());
}

std::vector<std::uint8_t> graph_section(const CooccurrenceGraphSet& g) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(g.max_distance()));
  for (std::size_t d = 0; d < g.max_distance(); ++d) {
    const auto edges = g.edges(d);
    w.u64(edges.size());
    for (const auto& e : edges) {
      w.u32(e.from);
      w.u32(e.to);
      w.u32(e.weight);
    }
  }
  return std::move(w.buffer());
}

std::vector<std::uint8_t> srt_section(const SemanticReducedTable& srt) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(srt.rows()));
  w.u32(static_cast<std::uint32_t>(srt.rank()));
  const float* data = srt.vectors().data();
  for (std::size_t i = 0; i < srt.rows() * srt.rank(); ++i) w.f32(data[i]);
  w.bytes(srt.present());
  for (const double s : srt.singular_values()) w.f64(s);
  return std::move(w.buffer());
}

std::vector<std::uint8_t> params_section(const ParamStore& p) {
  Writer w;
  write_params(w, p.base);
  w.u32(static_cast<std::uint32_t>(p.configs.size()));
  for (const auto& [id, params] : p.configs) {
    w.i32(id);
    write_params(w, params);
  }
  return std::move(w.buffer());
}

void read_conf(Reader r, Model& m) {
  m.config.max_distance = r.u64();
  m.config.svd_rank = r.u64();
  m.config.min_nonstop = r.u32();
  m.config.epsilon = r.f64();
  m.config.svd_seed = r.u64();
  m.sentence_count = r.u64();
  m.qualifying_sentences = r.u64();
  m.fingerprint = r.str();
  if (!r.done()) throw CorruptModel("trailing bytes in config section");
  if (m.config.max_distance == 0 || m.config.max_distance > 4096)
    throw CorruptModel("implausible max distance");
  if (!(m.config.epsilon > 0.0 && m.config.epsilon < 1.0)) throw CorruptModel("epsilon outside (0, 1)");
}

void read_vocab(Reader r, Vocabulary& v) {
  const auto n = r.u32();
  r.expect(n, 12);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::string word = r.str();
    const std::uint64_t count = r.u64();
    if (count == 0) throw CorruptModel("zero unigram count");
    if (v.add(word, count) != i) throw CorruptModel("duplicate vocabulary entry");
  }
  if (!r.done()) throw CorruptModel("trailing bytes in vocabulary section");
}

void read_graphs(Reader r, Model& m) {
  const auto depth = r.u32();
  if (depth != m.config.max_distance) throw CorruptModel("graph count disagrees with config");
  CooccurrenceGraphSet graphs(depth);
  const auto vocab_size = m.vocab.size();
  for (std::uint32_t d = 0; d < depth; ++d) {
    const auto count = r.u64();
    r.expect(count, 12);
    std::uint64_t prev = 0;
    for (std::uint64_t e = 0; e < count; ++e) {
      const WordId from = r.u32();
      const WordId to = r.u32();
      const std::uint32_t weight = r.u32();
      const std::uint64_t k = (static_cast<std::uint64_t>(from) << 32) | to;
      if (from >= vocab_size || to >= vocab_size || weight == 0 || (e > 0 && k <= prev))
        throw CorruptModel("malformed edge list");
      prev = k;
      graphs.add_edge(d, from, to, weight);
    }
  }
  if (!r.done()) throw CorruptModel("trailing bytes in graph section");
  m.graphs = std::move(graphs);
}

void read_srt(Reader r, Model& m) {
  const auto rows = r.u32();
  const auto k = r.u32();
  if (rows != m.vocab.size()) throw CorruptModel("semantic table rows disagree with vocabulary");
  r.expect(static_cast<std::uint64_t>(rows) * k, 4);
  RowMatrixF vectors(rows, k);
  float* data = vectors.data();
  for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * k; ++i) data[i] = r.f32();
  const auto mask = r.take(rows);
  std::vector<std::uint8_t> present(mask.begin(), mask.end());
  std::vector<double> sv(k);
  for (auto& s : sv) s = r.f64();
  if (!r.done()) throw CorruptModel("trailing bytes in semantic table section");
  m.srt = SemanticReducedTable(std::move(vectors), std::move(present), std::move(sv));
}

ParamStore read_param_store(Reader r) {
  ParamStore p;
  p.base = read_params(r);
  const auto n = r.u32();
  r.expect(n, 4);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto id = r.i32();
    p.configs[id] = read_params(r);
  }
  if (!r.done()) throw CorruptModel("trailing bytes in parameter section");
  return p;
}

}  // namespace

std::vector<std::uint8_t> serialize(const Model& model, const ParamStore& params) {
  Writer w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kMagic.data()), kMagic.size()});
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(kSectionOrder.size()));
  auto section = [&](std::uint32_t tag, const std::vector<std::uint8_t>& payload) {
    w.u32(tag);
    w.u64(payload.size());
    w.bytes(payload);
    w.u32(checksum(payload));
  };
  section(kConf, conf_section(model));
  section(kVocab, vocab_section(model.vocab));
  section(kGraphs, graph_section(model.graphs));
  section(kSrt, srt_section(model.srt));
  section(kParams, params_section(params));
  return std::move(w.buffer());
}

ModelBundle deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin(),
                  [](std::uint8_t a, char b) { return a == static_cast<std::uint8_t>(b); }))
    throw CorruptModel("not a model file (bad magic)");
  const auto version = r.u32();
  if (version != kFormatVersion) throw UnsupportedVersion(version);
  const auto count = r.u32();
  if (count != kSectionOrder.size()) throw CorruptModel("unexpected section count");

  ModelBundle bundle;
  for (const std::uint32_t expected : kSectionOrder) {
    const auto tag = r.u32();
    if (tag != expected) throw CorruptModel("unexpected section tag");
    const auto length = r.u64();
    r.expect(length, 1);
    const auto payload = r.take(static_cast<std::size_t>(length));
    if (r.u32() != checksum(payload)) throw CorruptModel("section checksum mismatch");
    Reader sub(payload);
    if (tag == kConf) read_conf(sub, bundle.model);
    else if (tag == kVocab) read_vocab(sub, bundle.model.vocab);
    else if (tag == kGraphs) read_graphs(sub, bundle.model);
    else if (tag == kSrt) read_srt(sub, bundle.model);
    else bundle.params = read_param_store(sub);
  }
  if (!r.done()) throw CorruptModel("trailing bytes after last section");
  return bundle;
}

void save(const Model& model, const ParamStore& params, const std::filesystem::path& path) {
  const auto bytes = serialize(model, params);
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot replace " + path.string() + ": " + ec.message());
  }
}

ModelBundle load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace lexblend
