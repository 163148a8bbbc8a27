#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace lmms {

/// Coarse part of speech. Satellite adjectives are folded into Adj.
enum class Pos : unsigned char { Noun = 0, Verb = 1, Adj = 2, Adv = 3 };

inline constexpr std::array<Pos, 4> kAllPos = {Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv};

constexpr std::size_t index_of(Pos p) noexcept { return static_cast<std::size_t>(p); }

std::string_view to_string(Pos p) noexcept;

/// WordNet letter: n, v, a, r.
char pos_letter(Pos p) noexcept;

/// Accepts WordNet letters (n v a s r), the coarse tags NOUN/VERB/ADJ/ADV
/// (any case) and Penn Treebank tags (NN*, VB*, JJ*, RB*).
std::optional<Pos> parse_pos(std::string_view tag) noexcept;

/// POS encoded in a sensekey's ss_type digit (1..5).
std::optional<Pos> pos_of_sensekey(std::string_view sensekey) noexcept;

}  // namespace lmms
