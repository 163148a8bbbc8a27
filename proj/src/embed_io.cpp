#include "lmms/embed_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

#include "lmms/error.hpp"
#include "lmms/inventory.hpp"
#include "lmms/log.hpp"

namespace lmms {
namespace {

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

EmbeddingReader::EmbeddingReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw Error("cannot open embeddings '" + path + "'");
  unsigned char header[10];
  in_.read(reinterpret_cast<char*>(header), sizeof header);
  if (in_.gcount() != static_cast<std::streamsize>(sizeof header))
    throw ParseError(path, 0, "truncated header");
  if (std::memcmp(header, kEmbeddingMagic, 4) != 0) throw ParseError(path, 0, "bad magic (expected LMEB)");
  const auto version = get_u16(header + 4);
  if (version != kEmbeddingVersion) throw ParseError(path, 0, "unsupported version " + std::to_string(version));
  dim_ = get_u32(header + 6);
  if (dim_ == 0) throw ParseError(path, 0, "dimension must be positive");
  offset_ = sizeof header;
  buffer_.resize(static_cast<std::size_t>(dim_) * 4);
}

bool EmbeddingReader::next(TokenEmbeddingRecord& out) {
  unsigned char len_bytes[2];
  in_.read(reinterpret_cast<char*>(len_bytes), 2);
  const auto got = in_.gcount();
  if (got == 0) return false;
  const auto record_offset = offset_;
  auto truncated = [&] {
    return ParseError(path_, 0, "truncated record at byte offset " + std::to_string(record_offset));
  };
  if (got != 2) throw truncated();
  const auto key_len = get_u16(len_bytes);
  out.key.resize(key_len);
  in_.read(out.key.data(), key_len);
  if (in_.gcount() != key_len) throw truncated();
  in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
  if (in_.gcount() != static_cast<std::streamsize>(buffer_.size())) throw truncated();
  out.vector.resize(dim_);
  for (std::uint32_t i = 0; i < dim_; ++i) out.vector[i] = std::bit_cast<float>(get_u32(buffer_.data() + 4 * i));
  if (!out.vector.allFinite())
    throw ParseError(path_, 0, "non-finite value in record at byte offset " + std::to_string(record_offset));
  offset_ += 2 + key_len + buffer_.size();
  return true;
}

std::optional<TokenEmbeddingRecord> EmbeddingReader::next() {
  TokenEmbeddingRecord r;
  if (!next(r)) return std::nullopt;
  return r;
}

EmbeddingWriter::EmbeddingWriter(const std::string& path, std::uint32_t dim)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), dim_(dim) {
  if (dim == 0) throw Error("embedding dimension must be positive");
  if (!out_) throw Error("cannot write embeddings '" + path + "'");
  out_.write(kEmbeddingMagic, 4);
  buffer_.clear();
  put_u16(buffer_, kEmbeddingVersion);
  put_u32(buffer_, dim_);
  out_.write(reinterpret_cast<const char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
}

EmbeddingWriter::~EmbeddingWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void EmbeddingWriter::write(std::string_view key, const Vector& vector) {
  if (closed_) throw Error("write after close on '" + path_ + "'");
  if (vector.size() != static_cast<Eigen::Index>(dim_))
    throw Error("record '" + std::string(key) + "' has dim " + std::to_string(vector.size()) + ", file dim is " +
                std::to_string(dim_));
  if (key.size() > 0xffff) throw Error("key longer than 65535 bytes");
  if (!vector.allFinite()) throw Error("record '" + std::string(key) + "' has non-finite values");
  if (!keys_.emplace(key).second) throw Error("duplicate key '" + std::string(key) + "'");
  buffer_.clear();
  put_u16(buffer_, static_cast<std::uint16_t>(key.size()));
  buffer_.insert(buffer_.end(), key.begin(), key.end());
  for (Eigen::Index i = 0; i < vector.size(); ++i) put_u32(buffer_, std::bit_cast<std::uint32_t>(vector[i]));
  out_.write(reinterpret_cast<const char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
  if (!out_) throw Error("write failed for '" + path_ + "'");
}

void EmbeddingWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.flush();
  if (!out_) throw Error("write failed for '" + path_ + "'");
  out_.close();
}

std::vector<TokenEmbeddingRecord> read_embeddings(const std::string& path) {
  EmbeddingReader reader(path);
  std::vector<TokenEmbeddingRecord> records;
  std::unordered_set<std::string> keys;
  TokenEmbeddingRecord r;
  while (reader.next(r)) {
    if (!keys.insert(r.key).second) throw ParseError(path, 0, "duplicate key '" + r.key + "'");
    records.push_back(r);
  }
  return records;
}

void write_embeddings(const std::string& path, std::span<const TokenEmbeddingRecord> records, std::uint32_t dim) {
  EmbeddingWriter writer(path, dim);
  for (const auto& r : records) writer.write(r);
  writer.close();
}

const Vector* StaticVectors::find(std::string_view word) const {
  if (auto it = vectors.find(std::string(word)); it != vectors.end()) return &it->second;
  if (auto it = vectors.find(normalize_lemma(word)); it != vectors.end()) return &it->second;
  return nullptr;
}

StaticVectors read_static(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open static vectors '" + path + "'");
  StaticVectors out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  std::size_t count = 0;
  {
    std::istringstream header(line);
    if (!(header >> count >> out.dim) || out.dim == 0) throw ParseError(path, 1, "header must be '<count> <dim>'");
  }
  std::size_t lineno = 1;
  std::size_t entries = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) throw ParseError(path, lineno, "malformed line");
    std::string lemma = line.substr(0, sp);
    Vector v(out.dim);
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    std::uint32_t n = 0;
    while (true) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      float value = 0;
      const auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc() || (next != end && *next != ' '))
        throw ParseError(path, lineno, "malformed number for '" + lemma + "'");
      if (n == out.dim) throw ParseError(path, lineno, "more than " + std::to_string(out.dim) + " values");
      v[n++] = value;
      p = next;
    }
    if (n != out.dim)
      throw ParseError(path, lineno,
                       "expected " + std::to_string(out.dim) + " values, got " + std::to_string(n) + " for '" + lemma +
                           "'");
    if (!v.allFinite()) throw ParseError(path, lineno, "non-finite value for '" + lemma + "'");
    ++entries;
    auto [it, inserted] = out.vectors.insert_or_assign(std::move(lemma), std::move(v));
    if (!inserted) warn(path + ":" + std::to_string(lineno) + ": duplicate lemma '" + it->first + "' overwrites earlier entry");
  }
  if (entries != count)
    throw ParseError(path, 1, "header announces " + std::to_string(count) + " entries, file has " +
                                  std::to_string(entries));
  return out;
}

void write_static(const std::string& path, const StaticVectors& vectors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write static vectors '" + path + "'");
  std::vector<const std::pair<const std::string, Vector>*> sorted;
  sorted.reserve(vectors.vectors.size());
  for (const auto& kv : vectors.vectors) sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
  out << sorted.size() << ' ' << vectors.dim << '\n';
  char buf[32];
  for (const auto* kv : sorted) {
    if (kv->second.size() != static_cast<Eigen::Index>(vectors.dim))
      throw Error("static vector '" + kv->first + "' does not match dim " + std::to_string(vectors.dim));
    out << kv->first;
    for (Eigen::Index i = 0; i < kv->second.size(); ++i) {
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, kv->second[i]);
      out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace lmms
