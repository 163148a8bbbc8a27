#include "lmms/sense_set.hpp"

#include <fstream>
#include <sstream>

#include "lmms/embed_io.hpp"
#include "lmms/error.hpp"

namespace lmms {

namespace {
constexpr std::string_view kSidecarHeader = "lmms-sense-set 1";
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Annotated: return "ANNOTATED";
    case Provenance::SynsetImputed: return "SYNSET_IMPUTED";
    case Provenance::HypernymImputed: return "HYPERNYM_IMPUTED";
    case Provenance::LexnameImputed: return "LEXNAME_IMPUTED";
    case Provenance::GlobalFallback: return "GLOBAL_FALLBACK";
    case Provenance::Dictionary: return "DICTIONARY";
  }
  return "?";
}

std::optional<Provenance> parse_provenance(std::string_view s) noexcept {
  for (auto p : {Provenance::Annotated, Provenance::SynsetImputed, Provenance::HypernymImputed,
                 Provenance::LexnameImputed, Provenance::GlobalFallback, Provenance::Dictionary})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::string_view to_string(SetConfig c) noexcept {
  switch (c) {
    case SetConfig::Sense1024: return "SENSE_1024";
    case SetConfig::Dict1024: return "DICT_1024";
    case SetConfig::Avg1024: return "AVG_1024";
    case SetConfig::Concat2048: return "CONCAT_2048";
    case SetConfig::Concat2348: return "CONCAT_2348";
  }
  return "?";
}

std::optional<SetConfig> parse_set_config(std::string_view s) noexcept {
  for (auto c : {SetConfig::Sense1024, SetConfig::Dict1024, SetConfig::Avg1024, SetConfig::Concat2048,
                 SetConfig::Concat2348})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<SetConfig> parse_config_selector(std::string_view s) noexcept {
  if (s == "1024") return SetConfig::Sense1024;
  if (s == "2048") return SetConfig::Concat2048;
  if (s == "2348") return SetConfig::Concat2348;
  if (s == "avg") return SetConfig::Avg1024;
  if (s == "dict") return SetConfig::Dict1024;
  return parse_set_config(s);
}

void SenseVectorSet::insert(std::string key, SenseEntry entry) {
  if (static_cast<std::size_t>(entry.vector.size()) != dim_)
    throw Error("sense '" + key + "' has dim " + std::to_string(entry.vector.size()) + ", set dim is " +
                std::to_string(dim_));
  if (!entry.vector.allFinite()) throw Error("sense '" + key + "' has non-finite values");
  entries_.insert_or_assign(std::move(key), std::move(entry));
}

const SenseEntry& SenseVectorSet::at(std::string_view key) const {
  if (const auto* e = find(key)) return *e;
  throw Error("no vector for sense '" + std::string(key) + "'");
}

const SenseEntry* SenseVectorSet::find(std::string_view key) const {
  const auto it = entries_.find(std::string(key));
  return it == entries_.end() ? nullptr : &it->second;
}

std::map<Provenance, std::size_t> SenseVectorSet::provenance_counts() const {
  std::map<Provenance, std::size_t> counts;
  for (const auto& [_, e] : entries_) ++counts[e.provenance];
  return counts;
}

std::string sidecar_path(const std::string& vectors_path) { return vectors_path + ".meta"; }

void write_sidecar(const std::string& vectors_path, const SidecarData& data) {
  const auto path = sidecar_path(vectors_path);
  std::ofstream meta(path, std::ios::binary | std::ios::trunc);
  if (!meta) throw Error("cannot write '" + path + "'");
  std::map<Provenance, std::size_t> counts;
  for (auto p : data.provenance) ++counts[p];
  meta << kSidecarHeader << '\n';
  meta << "config " << to_string(data.config) << '\n';
  meta << "dim " << data.dim << '\n';
  meta << "entries " << data.keys.size() << '\n';
  for (const auto& c : data.coverage) meta << "coverage " << c.stage << ' ' << c.covered << ' ' << c.total << '\n';
  for (const auto& [p, n] : counts) meta << "provenance " << to_string(p) << ' ' << n << '\n';
  for (std::size_t i = 0; i < data.keys.size(); ++i)
    meta << "entry " << data.keys[i] << ' ' << to_string(data.provenance[i]) << ' ' << data.support[i] << '\n';
  if (!meta) throw Error("write failed for '" + path + "'");
}

SidecarData read_sidecar(const std::string& vectors_path) {
  const auto meta_path = sidecar_path(vectors_path);
  std::ifstream meta(meta_path);
  if (!meta) throw Error("cannot open '" + meta_path + "'");

  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(meta, line) || line != kSidecarHeader) throw ParseError(meta_path, 1, "not a sense-set sidecar");

  SidecarData data;
  bool have_config = false;
  std::optional<std::size_t> declared;
  while (std::getline(meta, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "config") {
      std::string name;
      fields >> name;
      const auto config = parse_set_config(name);
      if (!config) throw ParseError(meta_path, lineno, "unknown config '" + name + "'");
      data.config = *config;
      have_config = true;
    } else if (tag == "dim") {
      if (!(fields >> data.dim) || data.dim == 0) throw ParseError(meta_path, lineno, "bad dim");
    } else if (tag == "entries") {
      std::size_t n = 0;
      if (!(fields >> n)) throw ParseError(meta_path, lineno, "bad entry count");
      declared = n;
    } else if (tag == "coverage") {
      StageCoverage c;
      if (!(fields >> c.stage >> c.covered >> c.total)) throw ParseError(meta_path, lineno, "bad coverage line");
      data.coverage.push_back(c);
    } else if (tag == "provenance") {
      continue;  // derived from the entry lines
    } else if (tag == "entry") {
      std::string key, prov;
      std::uint32_t support = 0;
      if (!(fields >> key >> prov >> support)) throw ParseError(meta_path, lineno, "bad entry line");
      const auto p = parse_provenance(prov);
      if (!p) throw ParseError(meta_path, lineno, "unknown provenance '" + prov + "'");
      if (!data.keys.empty() && !(data.keys.back() < key))
        throw ParseError(meta_path, lineno, "entries must be sorted and unique");
      data.keys.push_back(std::move(key));
      data.provenance.push_back(*p);
      data.support.push_back(support);
    } else {
      throw ParseError(meta_path, lineno, "unknown field '" + tag + "'");
    }
  }
  if (!have_config || data.dim == 0) throw ParseError(meta_path, 0, "missing config or dim");
  if (!declared || *declared != data.keys.size())
    throw ParseError(meta_path, 0, "entry count disagrees with entry lines");
  return data;
}

void save_sense_set(const std::string& path, const SenseVectorSet& set) {
  SidecarData data{set.config(), set.dim(), set.coverage(), {}, {}, {}};
  EmbeddingWriter writer(path, static_cast<std::uint32_t>(set.dim()));
  for (const auto& [key, e] : set.entries()) {
    writer.write(key, e.vector);
    data.keys.push_back(key);
    data.provenance.push_back(e.provenance);
    data.support.push_back(e.support);
  }
  writer.close();
  write_sidecar(path, data);
}

SenseVectorSet load_sense_set(const std::string& path) {
  auto data = read_sidecar(path);
  EmbeddingReader reader(path);
  if (reader.dim() != data.dim) throw ParseError(path, 0, "dim disagrees with sidecar");
  SenseVectorSet set(data.config, data.dim);
  TokenEmbeddingRecord r;
  std::size_t i = 0;
  while (reader.next(r)) {
    if (i >= data.keys.size() || r.key != data.keys[i])
      throw ParseError(path, 0, "vector file and sidecar disagree at record " + std::to_string(i));
    set.insert(std::move(r.key), SenseEntry{std::move(r.vector), data.provenance[i], data.support[i]});
    ++i;
  }
  if (i != data.keys.size()) throw ParseError(path, 0, "vector file has fewer records than its sidecar");
  set.set_coverage(std::move(data.coverage));
  return set;
}

}  // namespace lmms
