#include "lmms/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lmms/error.hpp"
#include "lmms/inventory.hpp"

namespace lmms {
namespace {

bool is_correct(const Prediction& p, const std::vector<std::string>& gold) {
  return !p.ranked.empty() && std::find(gold.begin(), gold.end(), p.ranked.front()) != gold.end();
}

std::unordered_map<std::string_view, const Prediction*> index_predictions(std::span<const Prediction> predictions,
                                                                          const GoldKeySet& gold) {
  std::unordered_map<std::string_view, const Prediction*> by_id;
  by_id.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (!gold.contains(p.instance_id)) throw Error("prediction for unknown instance '" + p.instance_id + "'");
    if (!by_id.emplace(p.instance_id, &p).second)
      throw Error("duplicate prediction for instance '" + p.instance_id + "'");
  }
  return by_id;
}

std::string percent1(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
  return buf;
}

}  // namespace

double ScoreReport::precision() const noexcept {
  return attempted ? static_cast<double>(correct) / static_cast<double>(attempted) : 0.0;
}

double ScoreReport::recall() const noexcept {
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

double ScoreReport::f1() const noexcept {
  if (correct == 0) return 0.0;
  return static_cast<double>(2 * correct) / static_cast<double>(attempted + total);
}

ScoreReport score(std::span<const Prediction> predictions, const GoldKeySet& gold) {
  const auto by_id = index_predictions(predictions, gold);
  ScoreReport report;
  report.total = gold.size();
  for (const auto& [id, p] : by_id) {
    if (p->ranked.empty()) continue;
    ++report.attempted;
    if (is_correct(*p, gold.at(p->instance_id))) ++report.correct;
  }
  return report;
}

std::string testset_of(std::string_view instance_id, std::string_view fallback) {
  if (std::count(instance_id.begin(), instance_id.end(), '.') >= 3)
    return std::string(instance_id.substr(0, instance_id.find('.')));
  return std::string(fallback);
}

std::map<std::string, std::string> labels_from_ids(const GoldKeySet& gold, std::string_view fallback) {
  std::map<std::string, std::string> labels;
  for (const auto& [id, _] : gold) labels.emplace(id, testset_of(id, fallback));
  return labels;
}

std::map<std::string, ScoreReport> score_by_testset(std::span<const Prediction> predictions, const GoldKeySet& gold,
                                                    const std::map<std::string, std::string>& labels) {
  const auto by_id = index_predictions(predictions, gold);
  std::map<std::string, ScoreReport> reports;
  ScoreReport all;
  for (const auto& [id, keys] : gold) {
    const auto label = labels.find(id);
    if (label == labels.end()) throw Error("instance '" + id + "' has no test set label");
    auto& r = reports[label->second];
    ++r.total;
    ++all.total;
    const auto p = by_id.find(id);
    if (p == by_id.end() || p->second->ranked.empty()) continue;
    ++r.attempted;
    ++all.attempted;
    if (is_correct(*p->second, keys)) {
      ++r.correct;
      ++all.correct;
    }
  }
  reports["ALL"] = all;
  return reports;
}

std::size_t ConfusionMatrix::row_total(std::size_t gold) const noexcept {
  std::size_t n = 0;
  for (auto c : counts[gold]) n += c;
  return n;
}

double ConfusionMatrix::percent(std::size_t gold, std::size_t predicted) const noexcept {
  const auto n = row_total(gold);
  return n ? 100.0 * static_cast<double>(counts[gold][predicted]) / static_cast<double>(n) : 0.0;
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (std::size_t g = 0; g < 4; ++g) n += row_total(g);
  return n;
}

ConfusionMatrix pos_confusion(std::span<const Prediction> predictions, const GoldKeySet& gold,
                              const Inventory& inventory) {
  const auto by_id = index_predictions(predictions, gold);
  ConfusionMatrix m;
  for (const auto& p : predictions) {
    if (p.ranked.empty()) continue;
    const auto g = index_of(inventory.pos_of(gold.at(p.instance_id).front()));
    const auto q = index_of(inventory.pos_of(p.ranked.front()));
    ++m.counts[g][q];
  }
  return m;
}

std::vector<CurvePoint> acceptance_curve(std::span<const Prediction> predictions, const GoldKeySet& gold,
                                         std::span<const EvalInstance> instances, const Inventory& inventory,
                                         std::size_t k_max) {
  if (k_max == 0) throw Error("k_max must be at least 1");
  const auto by_id = index_predictions(predictions, gold);
  std::vector<CurvePoint> curve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) curve[k - 1].k = k;
  if (instances.empty()) return curve;

  std::vector<std::size_t> hits(k_max, 0);
  std::vector<double> baseline(k_max, 0.0);
  for (const auto& inst : instances) {
    const auto g = gold.find(inst.instance_id);
    if (g == gold.end()) throw Error("instance '" + inst.instance_id + "' has no gold keys");
    const auto n_candidates = inventory.candidates(inst.lemma, inst.pos).size();
    const auto p = by_id.find(inst.instance_id);
    const std::size_t depth = p == by_id.end() ? 0 : p->second->ranked.size();
    if (depth < std::min(k_max, n_candidates))
      throw Error("ranking for '" + inst.instance_id + "' is shallower than " +
                  std::to_string(std::min(k_max, n_candidates)));
    // First rank (1-based) at which a gold key appears.
    std::size_t first = 0;
    for (std::size_t i = 0; i < depth && !first; ++i)
      if (std::find(g->second.begin(), g->second.end(), p->second->ranked[i]) != g->second.end()) first = i + 1;
    for (std::size_t k = 1; k <= k_max; ++k) {
      if (first && first <= k) ++hits[k - 1];
      baseline[k - 1] += std::min(1.0, static_cast<double>(k) / static_cast<double>(n_candidates));
    }
  }
  const auto n = static_cast<double>(instances.size());
  for (std::size_t k = 0; k < k_max; ++k) {
    curve[k].accuracy = static_cast<double>(hits[k]) / n;
    curve[k].baseline = baseline[k] / n;
  }
  return curve;
}

std::string format_report_line(const std::string& testset, const ScoreReport& r) {
  return testset + ' ' + percent1(r.precision()) + ' ' + percent1(r.recall()) + ' ' + percent1(r.f1()) + ' ' +
         std::to_string(r.attempted) + ' ' + std::to_string(r.total);
}

void print_report_table(std::ostream& out, const std::map<std::string, ScoreReport>& reports) {
  out << std::left << std::setw(14) << "testset" << std::right << std::setw(7) << "P" << std::setw(7) << "R"
      << std::setw(7) << "F1" << std::setw(11) << "attempted" << std::setw(8) << "total" << '\n';
  auto row = [&](const std::string& name, const ScoreReport& r) {
    out << std::left << std::setw(14) << name << std::right << std::setw(7) << percent1(r.precision())
        << std::setw(7) << percent1(r.recall()) << std::setw(7) << percent1(r.f1()) << std::setw(11) << r.attempted
        << std::setw(8) << r.total << '\n';
  };
  for (const auto& [name, r] : reports)
    if (name != "ALL") row(name, r);
  if (const auto all = reports.find("ALL"); all != reports.end()) row("ALL", all->second);
}

void print_confusion(std::ostream& out, const ConfusionMatrix& m) {
  out << std::left << std::setw(8) << "gold";
  for (auto p : kAllPos) out << std::right << std::setw(9) << to_string(p);
  out << std::setw(9) << "n" << '\n';
  char buf[32];
  for (auto g : kAllPos) {
    out << std::left << std::setw(8) << to_string(g);
    for (auto p : kAllPos) {
      std::snprintf(buf, sizeof buf, "%.2f%%", m.percent(index_of(g), index_of(p)));
      out << std::right << std::setw(9) << buf;
    }
    out << std::setw(9) << m.row_total(index_of(g)) << '\n';
  }
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
  for (const auto& p : predictions)
    if (!p.ranked.empty()) out << p.instance_id << ' ' << p.ranked.front() << '\n';
}

std::vector<Prediction> read_predictions(std::istream& in, const std::string& source) {
  std::vector<Prediction> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    Prediction p;
    if (!(fields >> p.instance_id)) continue;
    for (std::string key; fields >> key;) p.ranked.push_back(key);
    if (!seen.insert(p.instance_id).second)
      throw ParseError(source, lineno, "duplicate prediction for '" + p.instance_id + "'");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace lmms
