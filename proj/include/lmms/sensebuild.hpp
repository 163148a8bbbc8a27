#pragma once

// Construction of sense vector sets:
//
//  * annotated senses: mean of the contextual embeddings of their occurrences;
//  * full coverage: missing senses imputed in three fixed stages, each one
//    finished before the next starts:
//      1. synset   - mean of the annotated senses of the same synset;
//      2. hypernym - mean of the synset vectors of the direct hypernyms;
//      3. lexname  - mean of all synset vectors under the same lexname;
//    synset vectors are means of a synset's sense vectors after stage 1;
//  * dictionary vectors from gloss token embeddings;
//  * merges: L2-normalized concatenation / average, and static lemma vectors.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lmms/corpora.hpp"
#include "lmms/embed_io.hpp"
#include "lmms/sense_set.hpp"

namespace lmms {

class Inventory;

/// Pulls the next record; returns false when exhausted.
using RecordSource = std::function<bool(TokenEmbeddingRecord&)>;

RecordSource records_from(std::span<const TokenEmbeddingRecord> records);
RecordSource records_from(EmbeddingReader& reader);

enum class MissingEmbeddingPolicy { Skip, Fail };

struct BuildOptions {
  std::size_t dim = 1024;
  MissingEmbeddingPolicy on_missing = MissingEmbeddingPolicy::Fail;
};

/// SENSE_1024 set: one entry per sense with at least one embedded annotation.
/// Embeddings are summed in record order. Records not referenced by any
/// annotation are ignored.
SenseVectorSet build_from_annotations(std::span<const AnnotatedToken> annotations, const RecordSource& embeddings,
                                      const BuildOptions& options = {});

/// Stage assignment for every inventory sense, before any vector arithmetic.
struct ExtensionPlan {
  std::map<std::string, Provenance> provenance;  // every inventory sense
  std::vector<std::string> fallback_lexnames;     // lexnames with no embedded synset
};

/// Combinatorial part of the extension: which stage covers each sense given
/// the set of annotated sensekeys (keys outside the inventory are ignored).
ExtensionPlan plan_extension(const std::unordered_set<std::string>& annotated, const Inventory& inventory);

/// Stage labels used in coverage reports.
inline constexpr std::string_view kStageNames[4] = {"annotated", "synset", "hypernym", "lexname"};

/// Cumulative coverage after each stage; fallback senses count toward the last stage.
std::vector<StageCoverage> coverage_report(const std::map<std::string, Provenance>& provenance,
                                           std::size_t inventory_senses);
std::vector<StageCoverage> coverage_report(const ExtensionPlan& plan, const Inventory& inventory);

/// Full-coverage extension of an annotated set. Entries that are not
/// Annotated, or whose keys are outside the inventory, are rejected.
SenseVectorSet extend_full_coverage(const SenseVectorSet& annotated, const Inventory& inventory);

/// "<sense lemma> - <synset lemmas> - <gloss>", underscores shown as spaces.
std::string compose_gloss_text(std::string_view sensekey, const Inventory& inventory);

/// Splits a gloss-token key "<sensekey>#<index>" into the sensekey.
std::string_view gloss_key_sense(std::string_view key);

/// DICT_1024 set: mean of each sense's gloss token embeddings (keys "<sensekey>#<i>").
SenseVectorSet build_dictionary_vectors(const RecordSource& gloss_tokens, const Inventory& inventory,
                                        std::size_t dim = 1024);

/// CONCAT_2048: [normalize(v_s); normalize(v_d)], provenance from sense_set.
SenseVectorSet merge_concat(const SenseVectorSet& sense_set, const SenseVectorSet& dict_set);

/// AVG_1024: (normalize(v_s) + normalize(v_d)) / 2, not renormalized.
SenseVectorSet merge_average(const SenseVectorSet& sense_set, const SenseVectorSet& dict_set);

/// CONCAT_2348: [v; normalize(v_l)] where v_l is the static vector of the sense's own lemma.
SenseVectorSet merge_static(const SenseVectorSet& concat_set, const StaticVectors& statics,
                            const Inventory& inventory);

}  // namespace lmms
