#pragma once

#include <cstddef>
#include <string>

#include "lmms/knn.hpp"

namespace lmms {

/// cos(v_a, v_t) - cos(v_b, v_t); antisymmetric in the anchors.
struct BiasScore {
  std::string target;
  std::string anchor_a;
  std::string anchor_b;
  double score = 0.0;
};

BiasScore bias_score(const SenseIndex& index, const std::string& target, const std::string& anchor_a,
                     const std::string& anchor_b);

/// Uninformed top-k over the whole index; the probe must already match the index layout.
MatchResult nearest_senses(const SenseIndex& index, const Vector& probe, std::size_t k);

}  // namespace lmms
