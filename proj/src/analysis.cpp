#include "lmms/analysis.hpp"

#include "lmms/error.hpp"

namespace lmms {
namespace {

std::size_t require_row(const SenseIndex& index, const std::string& key) {
  const auto r = index.row_of(key);
  if (!r) throw Error("sense '" + key + "' is not in the index");
  return *r;
}

}  // namespace

BiasScore bias_score(const SenseIndex& index, const std::string& target, const std::string& anchor_a,
                     const std::string& anchor_b) {
  const auto t = require_row(index, target);
  const auto a = require_row(index, anchor_a);
  const auto b = require_row(index, anchor_b);
  const VectorX<double> vt = index.row(t).transpose().cast<double>();
  const double tn = vt.norm();
  return {target, anchor_a, anchor_b, index.score(a, vt, tn) - index.score(b, vt, tn)};
}

MatchResult nearest_senses(const SenseIndex& index, const Vector& probe, std::size_t k) {
  if (k == 0) throw Error("k must be at least 1");
  MatchResult result;
  result.mode = MatchMode::Usm;
  result.ranking = rank(index, probe, k);
  return result;
}

}  // namespace lmms
