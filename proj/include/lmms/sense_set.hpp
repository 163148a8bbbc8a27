#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmms/vecmath.hpp"

namespace lmms {

/// Which stage produced a sense vector. Dictionary marks gloss-derived vectors.
enum class Provenance : unsigned char {
  Annotated,
  SynsetImputed,
  HypernymImputed,
  LexnameImputed,
  GlobalFallback,
  Dictionary,
};

std::string_view to_string(Provenance p) noexcept;
std::optional<Provenance> parse_provenance(std::string_view s) noexcept;

/// Layout of the vectors in a set. Dims are those of the contextual model
/// (1024 for BERT-large) and the static model (300); tests use smaller ones.
enum class SetConfig : unsigned char { Sense1024, Dict1024, Avg1024, Concat2048, Concat2348 };

std::string_view to_string(SetConfig c) noexcept;
std::optional<SetConfig> parse_set_config(std::string_view s) noexcept;

/// Short CLI selector: 1024, 2048, 2348, avg (and dict).
std::optional<SetConfig> parse_config_selector(std::string_view s) noexcept;

struct SenseEntry {
  Vector vector;
  Provenance provenance = Provenance::Annotated;
  std::uint32_t support = 0;  // number of contextual embeddings averaged; 0 unless Annotated
};

struct StageCoverage {
  std::string stage;
  std::size_t covered = 0;
  std::size_t total = 0;

  double fraction() const noexcept { return total ? static_cast<double>(covered) / static_cast<double>(total) : 0.0; }
  bool operator==(const StageCoverage&) const = default;
};

class SenseVectorSet {
 public:
  SenseVectorSet() = default;
  SenseVectorSet(SetConfig config, std::size_t dim) : config_(config), dim_(dim) {}

  SetConfig config() const noexcept { return config_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Inserts or replaces; rejects dimension mismatches and non-finite values.
  void insert(std::string key, SenseEntry entry);

  bool contains(std::string_view key) const { return entries_.contains(std::string(key)); }
  const SenseEntry& at(std::string_view key) const;
  const SenseEntry* find(std::string_view key) const;

  /// Entries ordered by sensekey.
  const std::map<std::string, SenseEntry>& entries() const noexcept { return entries_; }

  std::map<Provenance, std::size_t> provenance_counts() const;

  /// Per-stage coverage recorded when the set was extended (empty otherwise).
  const std::vector<StageCoverage>& coverage() const noexcept { return coverage_; }
  void set_coverage(std::vector<StageCoverage> coverage) { coverage_ = std::move(coverage); }

 private:
  SetConfig config_ = SetConfig::Sense1024;
  std::size_t dim_ = 0;
  std::map<std::string, SenseEntry> entries_;
  std::vector<StageCoverage> coverage_;
};

/// Sidecar metadata path for a vector file.
std::string sidecar_path(const std::string& vectors_path);

/// Contents of a sidecar; keys are sorted and aligned with provenance/support.
struct SidecarData {
  SetConfig config = SetConfig::Sense1024;
  std::size_t dim = 0;
  std::vector<StageCoverage> coverage;
  std::vector<std::string> keys;
  std::vector<Provenance> provenance;
  std::vector<std::uint32_t> support;
};

void write_sidecar(const std::string& vectors_path, const SidecarData& data);
SidecarData read_sidecar(const std::string& vectors_path);

/// Vectors in the binary embedding format (keys = sensekeys, sorted), plus a
/// text sidecar with config, dim, coverage, provenance counts and per-entry provenance.
void save_sense_set(const std::string& path, const SenseVectorSet& set);
SenseVectorSet load_sense_set(const std::string& path);

}  // namespace lmms
