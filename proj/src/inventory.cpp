#include "lmms/inventory.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <climits>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "lmms/error.hpp"

namespace lmms {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void validate_sensekey(std::string_view key, const std::string& source, std::size_t line) {
  const auto pct = key.find('%');
  if (pct == std::string_view::npos || pct == 0 || key.find('%', pct + 1) != std::string_view::npos)
    throw ParseError(source, line, "malformed sensekey '" + std::string(key) + "'");
  for (char c : key.substr(0, pct))
    if (std::isupper(static_cast<unsigned char>(c)))
      throw ParseError(source, line, "sensekey lemma must be lowercase: '" + std::string(key) + "'");
}

SynsetRecord parse_record(std::string_view line, const std::string& source, std::size_t lineno) {
  const auto fields = split(line, '\t');
  if (fields.size() != 7 && fields.size() != 8)
    throw ParseError(source, lineno, "expected 7 or 8 tab-separated fields, got " + std::to_string(fields.size()));

  SynsetRecord r;
  r.id = fields[0];
  if (r.id.empty()) throw ParseError(source, lineno, "empty synset id");

  if (fields[1].size() != 1) throw ParseError(source, lineno, "bad pos '" + std::string(fields[1]) + "'");
  r.pos_tag = fields[1][0];
  switch (r.pos_tag) {
    case 'n': r.pos = Pos::Noun; break;
    case 'v': r.pos = Pos::Verb; break;
    case 'a': case 's': r.pos = Pos::Adj; break;
    case 'r': r.pos = Pos::Adv; break;
    default: throw ParseError(source, lineno, "bad pos '" + std::string(fields[1]) + "'");
  }

  r.lexname = fields[2];
  if (r.lexname.empty()) throw ParseError(source, lineno, "missing lexname");

  for (auto l : split(fields[3], ',')) {
    if (l.empty()) throw ParseError(source, lineno, "empty lemma");
    r.lemmas.emplace_back(l);
  }
  for (auto k : split(fields[4], ',')) {
    validate_sensekey(k, source, lineno);
    r.senses.emplace_back(k);
  }
  if (r.lemmas.size() != r.senses.size())
    throw ParseError(source, lineno, "lemma and sensekey lists differ in length");

  if (fields[5] != "-") {
    for (auto h : split(fields[5], ',')) {
      if (h.empty()) throw ParseError(source, lineno, "empty hypernym id");
      r.hypernyms.emplace_back(h);
    }
  }

  r.gloss = fields[6];
  if (r.gloss.empty()) throw ParseError(source, lineno, "empty gloss");

  if (fields.size() == 8) {
    for (auto n : split(fields[7], ',')) {
      int value = 0;
      const auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), value);
      if (ec != std::errc() || ptr != n.data() + n.size() || value < 0)
        throw ParseError(source, lineno, "bad sense number '" + std::string(n) + "'");
      r.sense_numbers.push_back(value);
    }
    if (r.sense_numbers.size() != r.senses.size())
      throw ParseError(source, lineno, "sense number list differs in length from sensekeys");
  }
  return r;
}

template <typename T>
std::string join(const std::vector<T>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_same_v<T, std::string>) {
      out += items[i];
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

}  // namespace

std::string normalize_lemma(std::string_view lemma) {
  std::string out(lemma);
  for (auto& c : out) {
    if (c == ' ') c = '_';
    else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

Inventory Inventory::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open inventory '" + path + "'");
  return parse(in, path);
}

Inventory Inventory::parse(std::istream& in, const std::string& source) {
  std::vector<SynsetRecord> records;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    records.push_back(parse_record(line, source, lineno));
    lines.push_back(lineno);
  }
  return build(std::move(records), source, lines);
}

Inventory Inventory::from_records(std::vector<SynsetRecord> records, const std::string& source) {
  std::vector<std::size_t> lines(records.size());
  for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = i + 1;
  return build(std::move(records), source, lines);
}

Inventory Inventory::build(std::vector<SynsetRecord> records, const std::string& source,
                           const std::vector<std::size_t>& lines) {
  if (records.empty()) throw Error("empty inventory");

  Inventory inv;
  inv.synsets_ = std::move(records);
  inv.synset_by_id_.reserve(inv.synsets_.size());

  for (std::size_t i = 0; i < inv.synsets_.size(); ++i) {
    const auto& r = inv.synsets_[i];
    if (!inv.synset_by_id_.emplace(r.id, i).second)
      throw ParseError(source, lines[i], "duplicate synset id '" + r.id + "'");
  }

  struct Pending {
    int number;
    std::size_t order;
    const std::string* key;
  };
  std::unordered_map<std::pair<std::string, Pos>, std::vector<Pending>, LemmaPosHash> pending;
  std::unordered_set<std::string> lemma_set;

  for (std::size_t i = 0; i < inv.synsets_.size(); ++i) {
    const auto& r = inv.synsets_[i];
    for (const auto& h : r.hypernyms)
      if (!inv.synset_by_id_.contains(h))
        throw ParseError(source, lines[i], "dangling hypernym '" + h + "' in synset '" + r.id + "'");

    for (std::size_t j = 0; j < r.senses.size(); ++j) {
      if (!inv.sense_by_key_.emplace(r.senses[j], SenseRef{i, j}).second)
        throw ParseError(source, lines[i], "duplicate sensekey '" + r.senses[j] + "'");
      inv.sense_keys_.push_back(r.senses[j]);
      auto lemma = normalize_lemma(r.lemmas[j]);
      lemma_set.insert(lemma);
      const int number = r.sense_numbers.empty() || r.sense_numbers[j] == 0 ? INT_MAX : r.sense_numbers[j];
      pending[{std::move(lemma), r.pos}].push_back({number, inv.sense_keys_.size(), &r.senses[j]});
    }
    inv.lexname_members_[r.lexname].push_back(i);
  }

  inv.candidates_.reserve(pending.size());
  for (auto& [k, list] : pending) {
    std::stable_sort(list.begin(), list.end(), [](const Pending& a, const Pending& b) {
      return a.number != b.number ? a.number < b.number : a.order < b.order;
    });
    auto& out = inv.candidates_[k];
    out.reserve(list.size());
    for (const auto& p : list) out.push_back(*p.key);
  }
  inv.lemma_count_ = lemma_set.size();
  return inv;
}

void Inventory::save(std::ostream& out) const {
  for (const auto& r : synsets_) {
    out << r.id << '\t' << r.pos_tag << '\t' << r.lexname << '\t' << join(r.lemmas, ',') << '\t'
        << join(r.senses, ',') << '\t' << (r.hypernyms.empty() ? std::string("-") : join(r.hypernyms, ','))
        << '\t' << r.gloss;
    if (!r.sense_numbers.empty()) out << '\t' << join(r.sense_numbers, ',');
    out << '\n';
  }
}

void Inventory::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write inventory '" + path + "'");
  save(out);
  if (!out) throw Error("write failed for '" + path + "'");
}

const SynsetRecord& Inventory::synset(std::string_view id) const {
  if (const auto* r = find_synset(id)) return *r;
  throw Error("unknown synset '" + std::string(id) + "'");
}

const SynsetRecord* Inventory::find_synset(std::string_view id) const noexcept {
  const auto it = synset_by_id_.find(std::string(id));
  return it == synset_by_id_.end() ? nullptr : &synsets_[it->second];
}

std::size_t Inventory::synset_index(std::string_view id) const {
  const auto it = synset_by_id_.find(std::string(id));
  if (it == synset_by_id_.end()) throw Error("unknown synset '" + std::string(id) + "'");
  return it->second;
}

bool Inventory::has_sense(std::string_view key) const noexcept {
  return sense_by_key_.contains(std::string(key));
}

Inventory::SenseRef Inventory::sense(std::string_view key) const {
  const auto it = sense_by_key_.find(std::string(key));
  if (it == sense_by_key_.end()) throw Error("unknown sensekey '" + std::string(key) + "'");
  return it->second;
}

const SynsetRecord& Inventory::synset_of(std::string_view key) const { return synsets_[sense(key).synset]; }

Pos Inventory::pos_of(std::string_view key) const { return synset_of(key).pos; }

const std::string& Inventory::lemma_of(std::string_view key) const {
  const auto ref = sense(key);
  return synsets_[ref.synset].lemmas[ref.position];
}

const std::vector<std::string>* Inventory::find_candidates(std::string_view lemma, Pos pos) const {
  const auto it = candidates_.find({normalize_lemma(lemma), pos});
  return it == candidates_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& Inventory::candidates(std::string_view lemma, Pos pos) const {
  if (const auto* c = find_candidates(lemma, pos)) return *c;
  throw Error("unknown lemma '" + std::string(lemma) + "' with pos " + std::string(to_string(pos)));
}

const std::string& Inventory::first_sense(std::string_view lemma, Pos pos) const {
  return candidates(lemma, pos).front();
}

const std::vector<std::size_t>& Inventory::lexname_members(std::string_view lexname) const {
  const auto it = lexname_members_.find(std::string(lexname));
  if (it == lexname_members_.end()) throw Error("unknown lexname '" + std::string(lexname) + "'");
  return it->second;
}

std::vector<std::string> Inventory::lexnames() const {
  std::vector<std::string> out;
  out.reserve(lexname_members_.size());
  for (const auto& [name, _] : lexname_members_) out.push_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Inventory::max_candidates() const noexcept {
  std::size_t best = 0;
  for (const auto& [_, list] : candidates_) best = std::max(best, list.size());
  return best;
}

InventoryStats Inventory::stats() const noexcept {
  return {synsets_.size(), sense_keys_.size(), lemma_count_, lexname_members_.size()};
}

}  // namespace lmms
