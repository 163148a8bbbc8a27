#pragma once

// Sense-annotated corpora and evaluation sets in the unified evaluation
// framework layout: an XML data file
//
//   <corpus><text id=..><sentence id=..>
//     <wf lemma=.. pos=..>surface</wf>
//     <instance id=.. lemma=.. pos=..>surface</instance>
//
// plus a gold key file with lines `instance_id key [key ...]`.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmms/pos.hpp"

namespace lmms {

class Inventory;

struct CorpusToken {
  std::string surface;
  std::string lemma;
  std::optional<Pos> pos;
  std::string instance_id;  // empty for plain <wf> tokens
};

struct CorpusSentence {
  std::string doc_id;
  std::string sent_id;
  std::vector<CorpusToken> tokens;
};

struct AnnotatedToken {
  std::string doc_id;
  std::string sent_id;
  std::string token_span_id;
  std::string surface;
  std::string lemma;
  Pos pos = Pos::Noun;
  std::vector<std::string> gold_senses;
};

struct EvalInstance {
  std::string instance_id;
  std::string lemma;
  Pos pos = Pos::Noun;
  std::string doc_id;
  std::string sent_id;
  std::string token_span_id;
  std::string surface;
};

/// instance id -> gold sensekeys (non-empty, file order, duplicates removed).
using GoldKeySet = std::map<std::string, std::vector<std::string>>;

/// (normalized lemma, pos) -> sensekey -> count.
using SenseFrequencies = std::map<std::pair<std::string, Pos>, std::map<std::string, std::size_t>>;

enum class UnresolvedPolicy { Skip, Fail };

/// Sentences in document order. Throws ParseError on malformed XML or
/// instances without a usable pos attribute.
std::vector<CorpusSentence> parse_corpus_xml(std::istream& in, const std::string& source = "<stream>");
std::vector<CorpusSentence> read_corpus_xml(const std::string& path);

GoldKeySet parse_gold_keys(std::istream& in, const std::string& source = "<stream>");
GoldKeySet read_gold_keys(const std::string& path);

struct TrainingCorpus {
  std::vector<CorpusSentence> sentences;
  std::vector<AnnotatedToken> annotations;
};

/// Joins XML instances with their gold keys. Unresolvable keys and
/// instances without gold are dropped with a warning under Skip.
TrainingCorpus join_training(std::vector<CorpusSentence> sentences, const GoldKeySet& gold,
                             const Inventory& inventory, UnresolvedPolicy policy = UnresolvedPolicy::Skip,
                             const std::string& source = "<corpus>");

TrainingCorpus load_training_annotations(const std::string& xml_path, const std::string& gold_path,
                                         const Inventory& inventory,
                                         UnresolvedPolicy policy = UnresolvedPolicy::Skip);

struct EvalSet {
  std::vector<CorpusSentence> sentences;
  std::vector<EvalInstance> instances;
  GoldKeySet gold;
};

/// Strict join: every instance needs exactly one gold entry and vice versa;
/// with an inventory, every gold key must resolve.
EvalSet join_eval(std::vector<CorpusSentence> sentences, GoldKeySet gold, const Inventory* inventory = nullptr,
                  const std::string& source = "<eval>");

EvalSet load_eval_set(const std::string& xml_path, const std::string& gold_path,
                      const Inventory* inventory = nullptr);

/// Every gold key of every annotation contributes one count.
SenseFrequencies sense_frequencies(const std::vector<AnnotatedToken>& annotations);

}  // namespace lmms
