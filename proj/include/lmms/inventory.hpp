#pragma once

// WordNet sense inventory loaded from the line-oriented export:
//
//   synset_id \t pos \t lexname \t lemma,... \t sensekey,... \t hyp_id,...|- \t gloss [\t sense_no,...]
//
// The optional eighth column carries each sense's WordNet sense number so
// candidate lists can be ordered by it; without it, file order is used.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lmms/pos.hpp"

namespace lmms {

struct SynsetRecord {
  std::string id;
  Pos pos = Pos::Noun;
  char pos_tag = 'n';  // as written in the file ('s' for satellites)
  std::string lexname;
  std::vector<std::string> lemmas;
  std::vector<std::string> senses;  // aligned 1:1 with lemmas
  std::vector<std::string> hypernyms;
  std::string gloss;
  std::vector<int> sense_numbers;  // empty, or aligned with senses

  bool operator==(const SynsetRecord&) const = default;
};

struct InventoryStats {
  std::size_t synsets = 0;
  std::size_t senses = 0;
  std::size_t lemmas = 0;
  std::size_t lexnames = 0;

  bool operator==(const InventoryStats&) const = default;
};

/// Lowercases and replaces spaces with underscores.
std::string normalize_lemma(std::string_view lemma);

/// Immutable, cross-linked inventory index.
class Inventory {
 public:
  struct SenseRef {
    std::size_t synset;    // index into synsets()
    std::size_t position;  // index into that synset's lemmas/senses
  };

  static Inventory load(const std::string& path);
  static Inventory parse(std::istream& in, const std::string& source = "<stream>");
  static Inventory from_records(std::vector<SynsetRecord> records, const std::string& source = "<records>");

  /// Writes the canonical line format; parse(save(x)) reproduces x.
  void save(std::ostream& out) const;
  void save(const std::string& path) const;

  std::span<const SynsetRecord> synsets() const noexcept { return synsets_; }
  const SynsetRecord& synset(std::string_view id) const;
  const SynsetRecord* find_synset(std::string_view id) const noexcept;
  std::size_t synset_index(std::string_view id) const;

  bool has_sense(std::string_view key) const noexcept;
  SenseRef sense(std::string_view key) const;
  const SynsetRecord& synset_of(std::string_view key) const;
  Pos pos_of(std::string_view key) const;
  /// The lemma this sense belongs to, as written in its synset record.
  const std::string& lemma_of(std::string_view key) const;

  /// All sensekeys, in file order.
  std::span<const std::string> sense_keys() const noexcept { return sense_keys_; }

  /// Candidate senses for (lemma, pos) in sense-number order. Throws on unknown pairs.
  const std::vector<std::string>& candidates(std::string_view lemma, Pos pos) const;
  const std::vector<std::string>* find_candidates(std::string_view lemma, Pos pos) const;
  const std::string& first_sense(std::string_view lemma, Pos pos) const;

  /// Synset indices grouped under a lexname, in file order.
  const std::vector<std::size_t>& lexname_members(std::string_view lexname) const;
  std::vector<std::string> lexnames() const;

  /// Largest candidate list over all (lemma, pos) pairs.
  std::size_t max_candidates() const noexcept;

  InventoryStats stats() const noexcept;

 private:
  struct LemmaPosHash {
    std::size_t operator()(const std::pair<std::string, Pos>& k) const noexcept {
      return std::hash<std::string>{}(k.first) * 31u + static_cast<std::size_t>(k.second);
    }
  };

  static Inventory build(std::vector<SynsetRecord> records, const std::string& source,
                         const std::vector<std::size_t>& lines);

  std::vector<SynsetRecord> synsets_;
  std::vector<std::string> sense_keys_;
  std::unordered_map<std::string, std::size_t> synset_by_id_;
  std::unordered_map<std::string, SenseRef> sense_by_key_;
  std::unordered_map<std::pair<std::string, Pos>, std::vector<std::string>, LemmaPosHash> candidates_;
  std::unordered_map<std::string, std::vector<std::size_t>> lexname_members_;
  std::size_t lemma_count_ = 0;
};

}  // namespace lmms
