#pragma once

// Embedding interchange formats.
//
// Binary token embeddings (little-endian):
//   "LMEB" | u16 version = 1 | u32 dim | { u16 key_len | key bytes | dim x f32 }*
// There is no record count; a file ends after its last complete record.
//
// Static vectors, text:
//   <count> <dim>
//   <lemma> v1 ... v_dim

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lmms/vecmath.hpp"

namespace lmms {

inline constexpr char kEmbeddingMagic[4] = {'L', 'M', 'E', 'B'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;

struct TokenEmbeddingRecord {
  std::string key;
  Vector vector;
};

/// Streaming reader; holds at most one record in memory.
class EmbeddingReader {
 public:
  explicit EmbeddingReader(const std::string& path);

  std::uint32_t dim() const noexcept { return dim_; }
  const std::string& path() const noexcept { return path_; }

  /// Reads the next record into `out`; false at a clean end of file.
  bool next(TokenEmbeddingRecord& out);
  std::optional<TokenEmbeddingRecord> next();

 private:
  std::ifstream in_;
  std::string path_;
  std::uint32_t dim_ = 0;
  std::uint64_t offset_ = 0;
  std::vector<unsigned char> buffer_;
};

class EmbeddingWriter {
 public:
  EmbeddingWriter(const std::string& path, std::uint32_t dim);
  ~EmbeddingWriter();
  EmbeddingWriter(const EmbeddingWriter&) = delete;
  EmbeddingWriter& operator=(const EmbeddingWriter&) = delete;

  void write(std::string_view key, const Vector& vector);
  void write(const TokenEmbeddingRecord& record) { write(record.key, record.vector); }
  /// Flushes and checks the stream; called by the destructor if omitted (errors then ignored).
  void close();

  std::uint32_t dim() const noexcept { return dim_; }

 private:
  std::ofstream out_;
  std::string path_;
  std::uint32_t dim_;
  std::unordered_set<std::string> keys_;
  std::vector<unsigned char> buffer_;
  bool closed_ = false;
};

/// Whole-file read; additionally rejects duplicate keys.
std::vector<TokenEmbeddingRecord> read_embeddings(const std::string& path);
void write_embeddings(const std::string& path, std::span<const TokenEmbeddingRecord> records, std::uint32_t dim);

struct StaticVectors {
  std::uint32_t dim = 0;
  std::unordered_map<std::string, Vector> vectors;

  /// Exact lookup, then lowercase/underscore-normalized lookup.
  const Vector* find(std::string_view word) const;
};

StaticVectors read_static(const std::string& path);
/// Entries are written sorted by lemma.
void write_static(const std::string& path, const StaticVectors& vectors);

}  // namespace lmms
