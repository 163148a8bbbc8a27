#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lmms/corpora.hpp"

namespace lmms {

class Inventory;

/// Ranked answer for one instance; an empty ranking is an abstention.
struct Prediction {
  std::string instance_id;
  std::vector<std::string> ranked;
};

struct ScoreReport {
  std::size_t attempted = 0;
  std::size_t total = 0;
  std::size_t correct = 0;

  double precision() const noexcept;
  double recall() const noexcept;
  /// 2PR/(P+R), computed as 2c/(a+t) so P == R == F1 exactly when a == t.
  double f1() const noexcept;

  bool operator==(const ScoreReport&) const = default;
};

/// Top-1 scoring with any-match against the gold set. `total` is the size of
/// the gold set; instances without a prediction count as abstentions.
ScoreReport score(std::span<const Prediction> predictions, const GoldKeySet& gold);

/// Test set name from a framework instance id ("senseval2.d000.s000.t000" -> "senseval2").
/// Ids with fewer than four dot-separated parts belong to `fallback`.
std::string testset_of(std::string_view instance_id, std::string_view fallback = "ALL");

/// Per-set reports plus "ALL" over the union. `labels` maps every gold
/// instance to its set.
std::map<std::string, ScoreReport> score_by_testset(std::span<const Prediction> predictions, const GoldKeySet& gold,
                                                    const std::map<std::string, std::string>& labels);

std::map<std::string, std::string> labels_from_ids(const GoldKeySet& gold, std::string_view fallback = "ALL");

/// Rows: POS of the gold sense; columns: POS of the predicted top-1 sense.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 4>, 4> counts{};

  std::size_t row_total(std::size_t gold) const noexcept;
  /// Row-normalized percentage; 0 for an empty row.
  double percent(std::size_t gold, std::size_t predicted) const noexcept;
  std::size_t total() const noexcept;
};

/// Abstentions are skipped. The gold POS is that of the instance's first gold key.
ConfusionMatrix pos_confusion(std::span<const Prediction> predictions, const GoldKeySet& gold,
                              const Inventory& inventory);

struct CurvePoint {
  std::size_t k = 0;
  double accuracy = 0.0;
  double baseline = 0.0;
};

/// accuracy(k): share of instances whose gold set meets the top-k answers.
/// baseline(k): mean of min(1, k / |candidates(lemma, pos)|).
/// Every ranking must be at least min(k_max, |candidates|) deep.
std::vector<CurvePoint> acceptance_curve(std::span<const Prediction> predictions, const GoldKeySet& gold,
                                         std::span<const EvalInstance> instances, const Inventory& inventory,
                                         std::size_t k_max);

/// "<testset> <P> <R> <F1> <attempted> <total>", percentages with one decimal.
std::string format_report_line(const std::string& testset, const ScoreReport& report);
/// Aligned table with one row per test set.
void print_report_table(std::ostream& out, const std::map<std::string, ScoreReport>& reports);
void print_confusion(std::ostream& out, const ConfusionMatrix& matrix);

/// Framework-style key file: "instance_id key" per answered instance.
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);
std::vector<Prediction> read_predictions(std::istream& in, const std::string& source = "<stream>");

}  // namespace lmms
