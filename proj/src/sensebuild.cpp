#include "lmms/sensebuild.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "lmms/error.hpp"
#include "lmms/inventory.hpp"
#include "lmms/log.hpp"
#include "lmms/parallel.hpp"

namespace lmms {
namespace {

std::string underscores_to_spaces(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

void require_same_keys(const SenseVectorSet& a, const SenseVectorSet& b, const char* op) {
  if (a.size() != b.size())
    throw Error(std::string(op) + ": key sets differ (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + " entries)");
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  for (; ia != a.entries().end(); ++ia, ++ib)
    if (ia->first != ib->first)
      throw Error(std::string(op) + ": key sets differ at '" + ia->first + "' / '" + ib->first + "'");
}

/// Computes one output vector per entry of `base` in parallel, then inserts in key order.
template <typename Fn>
SenseVectorSet map_entries(const SenseVectorSet& base, SetConfig config, std::size_t dim, Fn&& fn) {
  std::vector<const std::pair<const std::string, SenseEntry>*> items;
  items.reserve(base.size());
  for (const auto& kv : base.entries()) items.push_back(&kv);
  std::vector<Vector> out(items.size());
  parallel_for(items.size(), [&](std::size_t i) { out[i] = fn(items[i]->first, items[i]->second); });
  SenseVectorSet result(config, dim);
  for (std::size_t i = 0; i < items.size(); ++i)
    result.insert(items[i]->first, SenseEntry{std::move(out[i]), items[i]->second.provenance, items[i]->second.support});
  result.set_coverage(base.coverage());
  return result;
}

}  // namespace

RecordSource records_from(std::span<const TokenEmbeddingRecord> records) {
  return [records, i = std::size_t{0}](TokenEmbeddingRecord& out) mutable {
    if (i == records.size()) return false;
    out = records[i++];
    return true;
  };
}

RecordSource records_from(EmbeddingReader& reader) {
  return [&reader](TokenEmbeddingRecord& out) { return reader.next(out); };
}

SenseVectorSet build_from_annotations(std::span<const AnnotatedToken> annotations, const RecordSource& embeddings,
                                      const BuildOptions& options) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_span;
  for (std::size_t i = 0; i < annotations.size(); ++i) by_span[annotations[i].token_span_id].push_back(i);

  std::map<std::string, MeanAccumulator<float>> sums;
  std::unordered_set<std::string> resolved;
  TokenEmbeddingRecord record;
  while (embeddings(record)) {
    if (static_cast<std::size_t>(record.vector.size()) != options.dim)
      throw Error("embedding '" + record.key + "' has dim " + std::to_string(record.vector.size()) + ", expected " +
                  std::to_string(options.dim));
    const auto it = by_span.find(record.key);
    if (it == by_span.end()) continue;
    if (!resolved.insert(record.key).second) throw Error("duplicate embedding for '" + record.key + "'");
    for (const auto idx : it->second)
      for (const auto& sense : annotations[idx].gold_senses) {
        auto [acc, inserted] = sums.try_emplace(sense, static_cast<Eigen::Index>(options.dim));
        acc->second.add(record.vector);
      }
  }

  std::size_t missing = 0;
  const std::string* first_missing = nullptr;
  for (const auto& a : annotations)
    if (!resolved.contains(a.token_span_id)) {
      if (!first_missing) first_missing = &a.token_span_id;
      ++missing;
    }
  if (missing) {
    const auto msg = std::to_string(missing) + " annotation(s) without an embedding (first: '" + *first_missing + "')";
    if (options.on_missing == MissingEmbeddingPolicy::Fail) throw Error(msg);
    warn(msg + ", skipped");
  }

  SenseVectorSet set(SetConfig::Sense1024, options.dim);
  for (const auto& [sense, acc] : sums)
    set.insert(sense, SenseEntry{acc.result(), Provenance::Annotated, static_cast<std::uint32_t>(acc.count())});
  return set;
}

ExtensionPlan plan_extension(const std::unordered_set<std::string>& annotated, const Inventory& inventory) {
  const auto synsets = inventory.synsets();
  std::vector<char> embedded(synsets.size(), 0);
  bool any = false;
  for (std::size_t i = 0; i < synsets.size(); ++i)
    for (const auto& key : synsets[i].senses)
      if (annotated.contains(key)) {
        embedded[i] = 1;
        any = true;
      }
  if (!any) throw Error("full-coverage extension needs at least one annotated sense in the inventory");

  std::unordered_map<std::string, bool> lexname_seeded;
  for (std::size_t i = 0; i < synsets.size(); ++i) lexname_seeded[synsets[i].lexname] |= embedded[i] != 0;

  ExtensionPlan plan;
  std::unordered_set<std::string> fallback;
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    const auto& s = synsets[i];
    Provenance missing_stage;
    if (embedded[i]) {
      missing_stage = Provenance::SynsetImputed;
    } else if (std::any_of(s.hypernyms.begin(), s.hypernyms.end(),
                           [&](const std::string& h) { return embedded[inventory.synset_index(h)] != 0; })) {
      missing_stage = Provenance::HypernymImputed;
    } else if (lexname_seeded[s.lexname]) {
      missing_stage = Provenance::LexnameImputed;
    } else {
      missing_stage = Provenance::GlobalFallback;
      if (fallback.insert(s.lexname).second) plan.fallback_lexnames.push_back(s.lexname);
    }
    for (const auto& key : s.senses)
      plan.provenance.emplace(key, annotated.contains(key) ? Provenance::Annotated : missing_stage);
  }
  std::sort(plan.fallback_lexnames.begin(), plan.fallback_lexnames.end());
  return plan;
}

std::vector<StageCoverage> coverage_report(const std::map<std::string, Provenance>& provenance,
                                           std::size_t inventory_senses) {
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& [_, p] : provenance) {
    switch (p) {
      case Provenance::Annotated: ++counts[0]; break;
      case Provenance::SynsetImputed: ++counts[1]; break;
      case Provenance::HypernymImputed: ++counts[2]; break;
      case Provenance::LexnameImputed:
      case Provenance::GlobalFallback: ++counts[3]; break;
      case Provenance::Dictionary: break;
    }
  }
  std::vector<StageCoverage> report;
  std::size_t covered = 0;
  for (int stage = 0; stage < 4; ++stage) {
    covered += counts[stage];
    report.push_back({std::string(kStageNames[stage]), covered, inventory_senses});
  }
  return report;
}

std::vector<StageCoverage> coverage_report(const ExtensionPlan& plan, const Inventory& inventory) {
  return coverage_report(plan.provenance, inventory.stats().senses);
}

SenseVectorSet extend_full_coverage(const SenseVectorSet& annotated, const Inventory& inventory) {
  if (annotated.empty()) throw Error("full-coverage extension needs at least one annotated sense");
  std::unordered_set<std::string> keys;
  for (const auto& [key, e] : annotated.entries()) {
    if (e.provenance != Provenance::Annotated) throw Error("input sense '" + key + "' is not an annotated vector");
    if (!inventory.has_sense(key)) throw Error("annotated sense '" + key + "' is not in the inventory");
    keys.insert(key);
  }
  const auto plan = plan_extension(keys, inventory);
  for (const auto& lexname : plan.fallback_lexnames)
    warn("lexname '" + lexname + "' has no embedded synset; its senses use the global synset mean");

  const auto synsets = inventory.synsets();
  const auto dim = static_cast<Eigen::Index>(annotated.dim());

  // Stage 1 and synset vectors.
  std::map<std::string, Vector> vectors;
  std::vector<std::optional<Vector>> synset_vec(synsets.size());
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    const auto& s = synsets[i];
    MeanAccumulator<float> seed(dim);
    for (const auto& key : s.senses)
      if (const auto* e = annotated.find(key)) seed.add(e->vector);
    if (seed.count() == 0) continue;
    const Vector imputed = seed.result();
    MeanAccumulator<float> all(dim);
    for (const auto& key : s.senses) {
      const auto* e = annotated.find(key);
      const Vector& v = e ? e->vector : imputed;
      vectors.emplace(key, v);
      all.add(v);
    }
    synset_vec[i] = all.result();
  }

  // Lexname vectors, from synset vectors only.
  std::map<std::string, MeanAccumulator<float>> lexname_acc;
  MeanAccumulator<float> global(dim);
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    if (!synset_vec[i]) continue;
    lexname_acc.try_emplace(synsets[i].lexname, dim).first->second.add(*synset_vec[i]);
    global.add(*synset_vec[i]);
  }

  // Stages 2 and 3.
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    const auto& s = synsets[i];
    if (synset_vec[i]) continue;
    const Provenance stage = plan.provenance.at(s.senses.front());
    Vector v;
    if (stage == Provenance::HypernymImputed) {
      MeanAccumulator<float> hyp(dim);
      for (const auto& h : s.hypernyms)
        if (const auto& hv = synset_vec[inventory.synset_index(h)]) hyp.add(*hv);
      v = hyp.result();
    } else if (stage == Provenance::LexnameImputed) {
      v = lexname_acc.at(s.lexname).result();
    } else {
      v = global.result();
    }
    for (const auto& key : s.senses) vectors.emplace(key, v);
  }

  SenseVectorSet out(annotated.config(), annotated.dim());
  for (auto& [key, v] : vectors) {
    const auto p = plan.provenance.at(key);
    const std::uint32_t support = p == Provenance::Annotated ? annotated.at(key).support : 0;
    out.insert(key, SenseEntry{std::move(v), p, support});
  }
  out.set_coverage(coverage_report(plan, inventory));
  return out;
}

std::string compose_gloss_text(std::string_view sensekey, const Inventory& inventory) {
  const auto ref = inventory.sense(sensekey);
  const auto& s = inventory.synsets()[ref.synset];
  std::string text = underscores_to_spaces(s.lemmas[ref.position]);
  text += " -";
  for (const auto& lemma : s.lemmas) {
    text += ' ';
    text += underscores_to_spaces(lemma);
  }
  text += " - ";
  text += s.gloss;
  return text;
}

std::string_view gloss_key_sense(std::string_view key) {
  const auto hash = key.rfind('#');
  if (hash == std::string_view::npos || hash == 0) throw Error("gloss token key '" + std::string(key) + "' lacks '#'");
  return key.substr(0, hash);
}

SenseVectorSet build_dictionary_vectors(const RecordSource& gloss_tokens, const Inventory& inventory,
                                        std::size_t dim) {
  std::map<std::string, MeanAccumulator<float>> sums;
  std::unordered_set<std::string> seen;
  TokenEmbeddingRecord record;
  while (gloss_tokens(record)) {
    if (static_cast<std::size_t>(record.vector.size()) != dim)
      throw Error("gloss embedding '" + record.key + "' has dim " + std::to_string(record.vector.size()) +
                  ", expected " + std::to_string(dim));
    if (!seen.insert(record.key).second) throw Error("duplicate gloss embedding '" + record.key + "'");
    const std::string sense(gloss_key_sense(record.key));
    if (!inventory.has_sense(sense)) throw Error("gloss embedding for unknown sense '" + sense + "'");
    sums.try_emplace(sense, static_cast<Eigen::Index>(dim)).first->second.add(record.vector);
  }
  for (const auto& key : inventory.sense_keys())
    if (!sums.contains(key)) throw Error("sense '" + key + "' has no gloss token embeddings");

  SenseVectorSet set(SetConfig::Dict1024, dim);
  for (const auto& [sense, acc] : sums) set.insert(sense, SenseEntry{acc.result(), Provenance::Dictionary, 0});
  return set;
}

SenseVectorSet merge_concat(const SenseVectorSet& sense_set, const SenseVectorSet& dict_set) {
  if (sense_set.dim() != dict_set.dim()) throw Error("merge_concat: dimension mismatch");
  require_same_keys(sense_set, dict_set, "merge_concat");
  return map_entries(sense_set, SetConfig::Concat2048, 2 * sense_set.dim(),
                     [&](const std::string& key, const SenseEntry& e) {
                       return concat({l2_normalize(e.vector), l2_normalize(dict_set.at(key).vector)});
                     });
}

SenseVectorSet merge_average(const SenseVectorSet& sense_set, const SenseVectorSet& dict_set) {
  if (sense_set.dim() != dict_set.dim()) throw Error("merge_average: dimension mismatch");
  require_same_keys(sense_set, dict_set, "merge_average");
  return map_entries(sense_set, SetConfig::Avg1024, sense_set.dim(), [&](const std::string& key, const SenseEntry& e) {
    return mean(std::vector<Vector>{l2_normalize(e.vector), l2_normalize(dict_set.at(key).vector)});
  });
}

SenseVectorSet merge_static(const SenseVectorSet& concat_set, const StaticVectors& statics,
                            const Inventory& inventory) {
  if (concat_set.config() != SetConfig::Concat2048)
    throw Error("merge_static expects a CONCAT_2048 set, got " + std::string(to_string(concat_set.config())));
  if (statics.dim == 0) throw Error("merge_static: empty static vectors");
  // Resolve all lemmas up front so a missing one fails before any work.
  std::map<std::string, const Vector*> lemma_vec;
  for (const auto& [key, _] : concat_set.entries()) {
    const std::string& lemma = inventory.lemma_of(key);
    const Vector* v = statics.find(lemma);
    if (!v) v = statics.find(std::string_view(key).substr(0, key.find('%')));
    if (!v) throw Error("no static vector for lemma '" + lemma + "' (sense '" + key + "')");
    lemma_vec.emplace(key, v);
  }
  return map_entries(concat_set, SetConfig::Concat2348, concat_set.dim() + statics.dim,
                     [&](const std::string& key, const SenseEntry& e) {
                       return concat({e.vector, l2_normalize(*lemma_vec.at(key))});
                     });
}

}  // namespace lmms
