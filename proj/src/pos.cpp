#include "lmms/pos.hpp"

#include <algorithm>
#include <cctype>

namespace lmms {

std::string_view to_string(Pos p) noexcept {
  switch (p) {
    case Pos::Noun: return "NOUN";
    case Pos::Verb: return "VERB";
    case Pos::Adj: return "ADJ";
    case Pos::Adv: return "ADV";
  }
  return "?";
}

char pos_letter(Pos p) noexcept {
  switch (p) {
    case Pos::Noun: return 'n';
    case Pos::Verb: return 'v';
    case Pos::Adj: return 'a';
    case Pos::Adv: return 'r';
  }
  return '?';
}

std::optional<Pos> parse_pos(std::string_view tag) noexcept {
  if (tag.size() == 1) {
    switch (tag[0]) {
      case 'n': case 'N': return Pos::Noun;
      case 'v': case 'V': return Pos::Verb;
      case 'a': case 'A': case 's': case 'S': return Pos::Adj;
      case 'r': case 'R': return Pos::Adv;
      default: return std::nullopt;
    }
  }
  std::string upper(tag);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "NOUN" || upper == "PROPN") return Pos::Noun;
  if (upper == "VERB") return Pos::Verb;
  if (upper == "ADJ" || upper == "ADJECTIVE") return Pos::Adj;
  if (upper == "ADV" || upper == "ADVERB") return Pos::Adv;
  // Penn Treebank
  if (upper.starts_with("NN")) return Pos::Noun;
  if (upper.starts_with("VB") || upper == "MD") return Pos::Verb;
  if (upper.starts_with("JJ")) return Pos::Adj;
  if (upper.starts_with("RB") || upper == "WRB") return Pos::Adv;
  return std::nullopt;
}

std::optional<Pos> pos_of_sensekey(std::string_view sensekey) noexcept {
  const auto pct = sensekey.find('%');
  if (pct == std::string_view::npos || pct + 1 >= sensekey.size()) return std::nullopt;
  switch (sensekey[pct + 1]) {
    case '1': return Pos::Noun;
    case '2': return Pos::Verb;
    case '3': case '5': return Pos::Adj;
    case '4': return Pos::Adv;
    default: return std::nullopt;
  }
}

}  // namespace lmms
