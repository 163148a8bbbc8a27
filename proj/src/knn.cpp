#include "lmms/knn.hpp"

#include <algorithm>
#include <numeric>

#include "lmms/error.hpp"
#include "lmms/inventory.hpp"

namespace lmms {

SenseIndex SenseIndex::build(const SenseVectorSet& set) {
  if (set.empty()) throw Error("cannot index an empty sense set");
  SenseIndex index;
  index.config_ = set.config();
  const auto n = static_cast<Eigen::Index>(set.size());
  index.rows_.resize(n, static_cast<Eigen::Index>(set.dim()));
  index.keys_.reserve(set.size());
  index.provenance_.reserve(set.size());
  index.support_.reserve(set.size());
  Eigen::Index r = 0;
  for (const auto& [key, e] : set.entries()) {
    if (!(l2_norm(e.vector) > kNormEpsilon)) throw Error("sense '" + key + "' has a zero vector");
    index.rows_.row(r++) = l2_normalize(e.vector).transpose();
    index.keys_.push_back(key);
    index.provenance_.push_back(e.provenance);
    index.support_.push_back(e.support);
  }
  index.row_norms_.resize(index.keys_.size());
  index.row_by_key_.reserve(index.keys_.size());
  for (std::size_t i = 0; i < index.keys_.size(); ++i) {
    index.row_norms_[i] = l2_norm(index.row(i));
    index.row_by_key_.emplace(index.keys_[i], i);
  }
  return index;
}

void SenseIndex::save(const std::string& path) const {
  EmbeddingWriter writer(path, static_cast<std::uint32_t>(dim()));
  Vector buffer(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < size(); ++i) {
    buffer = row(i).transpose();
    writer.write(keys_[i], buffer);
  }
  writer.close();
  write_sidecar(path, SidecarData{config_, dim(), {}, keys_, provenance_, support_});
}

SenseIndex SenseIndex::load(const std::string& path) {
  auto meta = read_sidecar(path);
  EmbeddingReader reader(path);
  if (reader.dim() != meta.dim) throw ParseError(path, 0, "dim disagrees with sidecar");
  if (meta.keys.empty()) throw Error("cannot index an empty sense set");

  SenseIndex index;
  index.config_ = meta.config;
  index.rows_.resize(static_cast<Eigen::Index>(meta.keys.size()), static_cast<Eigen::Index>(meta.dim));
  TokenEmbeddingRecord r;
  std::size_t i = 0;
  while (reader.next(r)) {
    if (i >= meta.keys.size() || r.key != meta.keys[i])
      throw ParseError(path, 0, "vector file and sidecar disagree at record " + std::to_string(i));
    if (!(l2_norm(r.vector) > kNormEpsilon)) throw Error("sense '" + r.key + "' has a zero vector");
    index.rows_.row(static_cast<Eigen::Index>(i)) = l2_normalize(r.vector).transpose();
    ++i;
  }
  if (i != meta.keys.size()) throw ParseError(path, 0, "vector file has fewer records than its sidecar");
  index.keys_ = std::move(meta.keys);
  index.provenance_ = std::move(meta.provenance);
  index.support_ = std::move(meta.support);
  index.row_norms_.resize(index.keys_.size());
  index.row_by_key_.reserve(index.keys_.size());
  for (std::size_t k = 0; k < index.keys_.size(); ++k) {
    index.row_norms_[k] = l2_norm(index.row(k));
    index.row_by_key_.emplace(index.keys_[k], k);
  }
  return index;
}

std::optional<std::size_t> SenseIndex::row_of(std::string_view key) const {
  const auto it = row_by_key_.find(std::string(key));
  if (it == row_by_key_.end()) return std::nullopt;
  return it->second;
}

double SenseIndex::score(std::size_t r, const VectorX<double>& query, double query_norm) const {
  const double dot = rows_.row(static_cast<Eigen::Index>(r)).cast<double>().dot(query.transpose());
  return std::clamp(dot / (row_norms_[r] * query_norm), -1.0, 1.0);
}

Vector make_query_vector(const Query& query, SetConfig config, const StaticVectors* statics) {
  const Vector c = l2_normalize(query.contextual);
  switch (config) {
    case SetConfig::Sense1024:
    case SetConfig::Dict1024:
    case SetConfig::Avg1024:
      return c;
    case SetConfig::Concat2048:
      return concat({c, c});
    case SetConfig::Concat2348: {
      if (!statics) throw Error("CONCAT_2348 queries need static vectors");
      const Vector* v = nullptr;
      if (query.surface && !query.surface->empty()) v = statics->find(normalize_lemma(*query.surface));
      if (!v && query.lemma) v = statics->find(normalize_lemma(*query.lemma));
      if (!v) {
        if (!query.surface && !query.lemma) throw Error("CONCAT_2348 queries need a token surface or lemma");
        throw Error("no static vector for token '" + query.surface.value_or(query.lemma.value_or("")) + "'");
      }
      return concat({c, c, l2_normalize(*v)});
    }
  }
  throw Error("unknown configuration");
}

std::vector<ScoredSense> rank(const SenseIndex& index, const Vector& query, std::size_t k,
                              std::optional<std::span<const std::size_t>> rows) {
  if (static_cast<std::size_t>(query.size()) != index.dim())
    throw Error("query dim " + std::to_string(query.size()) + " does not match index dim " +
                std::to_string(index.dim()));
  const VectorX<double> q = query.cast<double>();
  const double qn = q.norm();
  if (!(qn > kNormEpsilon)) throw Error("zero query vector");

  struct Hit {
    double score;
    std::size_t row;
  };
  std::vector<Hit> hits;
  if (rows) {
    hits.reserve(rows->size());
    for (auto r : *rows) hits.push_back({index.score(r, q, qn), r});
  } else {
    hits.resize(index.size());
    for (std::size_t r = 0; r < index.size(); ++r) hits[r] = {index.score(r, q, qn), r};
  }
  const auto better = [](const Hit& a, const Hit& b) { return a.score != b.score ? a.score > b.score : a.row < b.row; };
  const auto top = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top), hits.end(), better);

  std::vector<ScoredSense> out;
  out.reserve(top);
  for (std::size_t i = 0; i < top; ++i) out.push_back({index.key(hits[i].row), hits[i].score});
  return out;
}

std::string most_frequent_sense(const SenseFrequencies& frequencies, const Inventory& inventory,
                                std::string_view lemma, Pos pos) {
  const auto& candidates = inventory.candidates(lemma, pos);
  const auto it = frequencies.find({normalize_lemma(lemma), pos});
  if (it == frequencies.end()) return candidates.front();
  const std::string* best = &candidates.front();
  std::size_t best_count = 0;
  for (const auto& c : candidates) {
    const auto f = it->second.find(c);
    const std::size_t count = f == it->second.end() ? 0 : f->second;
    if (count > best_count) {
      best = &c;
      best_count = count;
    }
  }
  return *best;
}

MatchResult disambiguate_informed(const SenseIndex& index, const Query& query, const Inventory& inventory,
                                  const Fallback& fallback, const StaticVectors* statics) {
  if (!query.lemma || !query.pos) throw Error("informed disambiguation needs both lemma and pos");
  const auto& candidates = inventory.candidates(*query.lemma, *query.pos);

  MatchResult result;
  result.mode = MatchMode::Informed;
  std::vector<std::size_t> rows;
  rows.reserve(candidates.size());
  for (const auto& c : candidates)
    if (auto r = index.row_of(c)) rows.push_back(*r);

  if (!rows.empty()) {
    result.ranking = rank(index, make_query_vector(query, index.config(), statics), rows.size(), rows);
  } else if (fallback.frequencies) {
    result.ranking.push_back({most_frequent_sense(*fallback.frequencies, inventory, *query.lemma, *query.pos), 0.0});
    result.fallback_used = true;
  }
  return result;
}

MatchResult disambiguate_usm(const SenseIndex& index, const Query& query, std::size_t k,
                             const StaticVectors* statics) {
  if (k == 0) throw Error("k must be at least 1");
  MatchResult result;
  result.mode = MatchMode::Usm;
  result.ranking = rank(index, make_query_vector(query, index.config(), statics), k);
  return result;
}

}  // namespace lmms
