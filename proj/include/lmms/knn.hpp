#pragma once

// Exact cosine k-NN over a sense vector set.
//
// Rows are stored L2-normalized in float32 and sorted by sensekey, so the
// ascending-sensekey tie-break is the ascending-row tie-break. Scores are
// exact cosines of the stored rows, accumulated in double.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmms/corpora.hpp"
#include "lmms/embed_io.hpp"
#include "lmms/sense_set.hpp"

namespace lmms {

class Inventory;

class SenseIndex {
 public:
  using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  SenseIndex() = default;

  static SenseIndex build(const SenseVectorSet& set);

  /// Same vector/sidecar layout as a sense set; rows are stored normalized.
  void save(const std::string& path) const;
  static SenseIndex load(const std::string& path);

  SetConfig config() const noexcept { return config_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  std::size_t size() const noexcept { return keys_.size(); }

  std::span<const std::string> keys() const noexcept { return keys_; }
  const std::string& key(std::size_t row) const { return keys_.at(row); }
  std::optional<std::size_t> row_of(std::string_view key) const;

  auto row(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)); }
  const RowMatrix& matrix() const noexcept { return rows_; }

  /// Cosine between a stored row and a query (query_norm = ||query||).
  double score(std::size_t row, const VectorX<double>& query, double query_norm) const;

 private:
  SetConfig config_ = SetConfig::Sense1024;
  RowMatrix rows_;
  std::vector<double> row_norms_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> row_by_key_;
  // Original set metadata, kept so a saved index round-trips.
  std::vector<Provenance> provenance_;
  std::vector<std::uint32_t> support_;
};

struct Query {
  Vector contextual;
  std::optional<std::string> surface;
  std::optional<std::string> lemma;
  std::optional<Pos> pos;
};

enum class MatchMode { Informed, Usm };

struct ScoredSense {
  std::string key;
  double score = 0.0;

  bool operator==(const ScoredSense&) const = default;
};

struct MatchResult {
  std::vector<ScoredSense> ranking;  // empty = abstention
  MatchMode mode = MatchMode::Informed;
  bool fallback_used = false;
};

/// No fallback (abstain) or most-frequent-sense fallback.
struct Fallback {
  const SenseFrequencies* frequencies = nullptr;

  static Fallback none() noexcept { return {}; }
  static Fallback mfs(const SenseFrequencies& f) noexcept { return {&f}; }
};

/// Query vector in the layout of `config`:
///   1024 family -> normalize(c)
///   2048        -> [normalize(c); normalize(c)]
///   2348        -> [normalize(c); normalize(c); normalize(static(token))]
/// The static lookup uses the lowercased surface, falling back to the lemma.
Vector make_query_vector(const Query& query, SetConfig config, const StaticVectors* statics = nullptr);

/// Ranks rows against a query vector: all rows when `rows` is empty-optional,
/// else only the listed rows. Returns at most k results, best first.
std::vector<ScoredSense> rank(const SenseIndex& index, const Vector& query, std::size_t k,
                              std::optional<std::span<const std::size_t>> rows = std::nullopt);

/// Most-frequent sense for (lemma, pos): highest count, ties and unseen lemmas
/// resolved by sense-number order.
std::string most_frequent_sense(const SenseFrequencies& frequencies, const Inventory& inventory,
                                std::string_view lemma, Pos pos);

/// Informed WSD: candidates of (lemma, pos) that are present in the index,
/// ranked by cosine. When none are present the fallback decides.
MatchResult disambiguate_informed(const SenseIndex& index, const Query& query, const Inventory& inventory,
                                  const Fallback& fallback = Fallback::none(), const StaticVectors* statics = nullptr);

/// Uninformed sense matching: exact top-k over every row.
MatchResult disambiguate_usm(const SenseIndex& index, const Query& query, std::size_t k,
                             const StaticVectors* statics = nullptr);

}  // namespace lmms
