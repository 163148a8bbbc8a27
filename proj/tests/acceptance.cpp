// Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_set>

#include "lmms/corpora.hpp"
#include "lmms/evalkit.hpp"
#include "lmms/inventory.hpp"
#include "lmms/knn.hpp"
#include "lmms/log.hpp"
#include "lmms/sensebuild.hpp"
#include "support.hpp"

using namespace lmms;

namespace {

enum class Status { Pass, Fail, Skip, Excluded };

struct Outcome {
  Status status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

Outcome coverage_reproduction() {
  const char* inventory_path = env("LMMS_WN30_INVENTORY");
  const char* gold_path = env("LMMS_SEMCOR_GOLD");
  if (!inventory_path || !gold_path)
    return {Status::Skip, "needs LMMS_WN30_INVENTORY and LMMS_SEMCOR_GOLD (SemCor is not bundled)"};
  const auto t0 = Clock::now();
  const auto inventory = Inventory::load(inventory_path);
  std::unordered_set<std::string> annotated;
  if (const char* xml = env("LMMS_SEMCOR_XML")) {
    auto quiet = set_warning_sink([](std::string_view) {});
    for (const auto& a : load_training_annotations(xml, gold_path, inventory).annotations)
      annotated.insert(a.gold_senses.begin(), a.gold_senses.end());
    set_warning_sink(quiet);
  } else {
    for (const auto& [_, keys] : read_gold_keys(gold_path))
      for (const auto& k : keys)
        if (inventory.has_sense(k)) annotated.insert(k);
  }
  const auto report = coverage_report(plan_extension(annotated, inventory), inventory);
  const double expected[4] = {16.11, 26.97, 74.70, 100.00};
  std::string detail;
  bool ok = true;
  for (std::size_t s = 0; s < 4; ++s) {
    const double pct = 100.0 * report[s].fraction();
    ok = ok && std::abs(pct - expected[s]) <= 0.05;
    detail += report[s].stage + "=" + fmt("%.2f%%", pct) + " ";
  }
  const double t = seconds_since(t0);
  ok = ok && t < 60.0;
  return {ok ? Status::Pass : Status::Fail, detail + fmt("(%.1fs)", t)};
}

Outcome inventory_statistics() {
  const char* path = env("LMMS_WN30_INVENTORY");
  if (!path) return {Status::Skip, "needs LMMS_WN30_INVENTORY (WordNet 3.0 export)"};
  const auto out = test::cli({"stats", "--inventory", path});
  const std::string expected = "synsets 117659\nsenses 206949\nlemmas 147306\nlexnames 45\n";
  std::string flat = out;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  return {out == expected ? Status::Pass : Status::Fail, flat};
}

Outcome knn_oracle() {
  const auto world = test::synthetic_world(2019, 500, 32, 5);
  test::Gen gen(4242);
  std::vector<Query> queries;
  for (int q = 0; q < 1000; ++q)
    queries.push_back({test::unit_vector(gen, 32), std::nullopt, world.lemmas[gen.index(world.lemmas.size())],
                       Pos::Noun});

  const auto t0 = Clock::now();
  const auto index = SenseIndex::build(world.set);
  std::vector<MatchResult> informed, usm;
  for (const auto& q : queries) {
    informed.push_back(disambiguate_informed(index, q, world.inventory));
    usm.push_back(disambiguate_usm(index, q, index.size()));
  }
  const double t = seconds_since(t0);

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& cands = world.inventory.candidates(*queries[i].lemma, Pos::Noun);
    auto keys = [](const MatchResult& m) {
      std::vector<std::string> k;
      for (const auto& s : m.ranking) k.push_back(s.key);
      return k;
    };
    if (keys(informed[i]) != test::oracle_rank(world.set, queries[i].contextual, cands.size(), cands)) ++mismatches;
    if (keys(usm[i]) != test::oracle_rank(world.set, queries[i].contextual, index.size())) ++mismatches;
  }
  const bool ok = mismatches == 0 && t < 10.0;
  return {ok ? Status::Pass : Status::Fail,
          std::to_string(mismatches) + " mismatching rankings over 1000 informed + 1000 full USM queries, " +
              fmt("%.2fs", t)};
}

Outcome concat_identity() {
  test::Gen gen(77);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto vs = gen.nonzero(1024), vd = gen.nonzero(1024), c = gen.nonzero(1024);
    SenseVectorSet set(SetConfig::Concat2048, 2048);
    set.insert("x%1:00:00::", {concat({l2_normalize(vs), l2_normalize(vd)})});
    const auto index = SenseIndex::build(set);
    const double s = rank(index, make_query_vector({c}, SetConfig::Concat2048), 1).front().score;
    worst = std::max(worst, std::abs(s - (cosine(vs, c) + cosine(vd, c)) / 2));
  }
  return {worst < 1e-6 ? Status::Pass : Status::Fail, "max |diff| = " + fmt("%.3g", worst) + " over 1000 triples"};
}

Outcome propagation_oracle() {
  const auto inventory = Inventory::load(test::fixture("toy_inventory.tsv"));
  auto v2 = [](float a, float b) {
    Vector v(2);
    v << a, b;
    return v;
  };
  SenseVectorSet seed(SetConfig::Sense1024, 2);
  seed.insert("dog%1:05:00::", {v2(1, 0), Provenance::Annotated, 1});
  seed.insert("device%1:06:00::", {v2(0, 1), Provenance::Annotated, 1});

  // Hand computation on the fixture:
  //   synset embeddings after stage 1: dog.n.01 = (1,0), device.n.01 = (0,1)
  //   domestic_dog        synset of dog.n.01             -> (1,0)
  //   pug                 hypernym dog.n.01              -> (1,0)
  //   dog.n.02, firedog   hypernym device.n.01           -> (0,1)
  //   gadget              hypernyms dog.n.01, device.n.01 -> (0.5,0.5)
  //   animal, beast       noun.animal = {dog.n.01}        -> (1,0)
  struct Want {
    const char* key;
    Vector v;
    Provenance p;
  };
  const Want want[] = {
      {"dog%1:05:00::", v2(1, 0), Provenance::Annotated},
      {"device%1:06:00::", v2(0, 1), Provenance::Annotated},
      {"domestic_dog%1:05:00::", v2(1, 0), Provenance::SynsetImputed},
      {"pug%1:05:00::", v2(1, 0), Provenance::HypernymImputed},
      {"dog%1:06:00::", v2(0, 1), Provenance::HypernymImputed},
      {"firedog%1:06:00::", v2(0, 1), Provenance::HypernymImputed},
      {"gadget%1:06:00::", v2(0.5f, 0.5f), Provenance::HypernymImputed},
      {"animal%1:05:00::", v2(1, 0), Provenance::LexnameImputed},
      {"beast%1:05:00::", v2(1, 0), Provenance::LexnameImputed},
  };
  const auto full = extend_full_coverage(seed, inventory);
  std::size_t bad = 0;
  double worst = 0.0;
  for (const auto& w : want) {
    const auto* e = full.find(w.key);
    if (!e || e->provenance != w.p) {
      ++bad;
      continue;
    }
    worst = std::max(worst, static_cast<double>((e->vector - w.v).cwiseAbs().maxCoeff()));
  }
  const std::vector<StageCoverage> stages{{"annotated", 2, 9}, {"synset", 3, 9}, {"hypernym", 7, 9}, {"lexname", 9, 9}};
  const bool ok = bad == 0 && worst < 1e-6 && full.size() == 9 && full.coverage() == stages;
  return {ok ? Status::Pass : Status::Fail, std::to_string(bad) + " provenance mismatches, max |diff| = " +
                                                fmt("%.3g", worst) + ", stage order annotated/synset/hypernym/lexname"};
}

Outcome scorer_identities() {
  test::Gen gen(606);
  std::size_t violations = 0;
  for (int t = 0; t < 1000; ++t) {
    GoldKeySet gold;
    std::vector<Prediction> p;
    const std::size_t n = 1 + gen.index(2000);
    for (std::size_t i = 0; i < n; ++i) {
      gold[std::to_string(i)] = {"g"};
      p.push_back({std::to_string(i), {gen.index(4) ? "g" : "x"}});
    }
    const auto r = score(p, gold);
    if (!(r.precision() == r.recall() && r.recall() == r.f1())) ++violations;
  }
  GoldKeySet gold;
  std::vector<Prediction> p;
  for (int i = 0; i < 10; ++i) gold["i" + std::to_string(i)] = {"k" + std::to_string(i)};
  for (int i = 0; i < 7; ++i) p.push_back({"i" + std::to_string(i), {i < 5 ? "k" + std::to_string(i) : "x"}});
  const auto r = score(p, gold);
  const bool fixture_ok = std::abs(r.precision() - 0.714286) < 1e-6 && std::abs(r.recall() - 0.5) < 1e-6 &&
                          std::abs(r.f1() - 0.588235) < 1e-6;
  return {violations == 0 && fixture_ok ? Status::Pass : Status::Fail,
          std::to_string(violations) + " P/R/F1 inequalities in 1000 full runs; abstention fixture P=" +
              fmt("%.6f", r.precision()) + " R=" + fmt("%.6f", r.recall()) + " F1=" + fmt("%.6f", r.f1())};
}

Outcome determinism() {
  test::TempDir inputs, run_a, run_b;
  const auto in = test::write_fixture_inputs(inputs);
  const auto a = test::run_fixture_pipeline(in, run_a);
  const auto b = test::run_fixture_pipeline(in, run_b);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (test::read_file(a[i]) != test::read_file(b[i])) ++differing;
  return {differing == 0 && a.size() == b.size() ? Status::Pass : Status::Fail,
          std::to_string(differing) + " of " + std::to_string(a.size()) + " artifacts differ between two runs"};
}

Outcome confusion_and_curve() {
  test::TempDir inputs, run;
  const auto in = test::write_fixture_inputs(inputs);
  test::run_fixture_pipeline(in, run);
  const auto inventory = Inventory::load(in.inventory);
  const auto gold = read_gold_keys(in.eval_gold);

  std::size_t bad_rows = 0, rows = 0;
  auto check_rows = [&](const ConfusionMatrix& m) {
    for (std::size_t g = 0; g < 4; ++g) {
      if (!m.row_total(g)) continue;
      ++rows;
      double sum = 0;
      for (std::size_t q = 0; q < 4; ++q) sum += m.percent(g, q);
      if (std::abs(sum - 100.0) > 0.01) ++bad_rows;
    }
  };
  for (const std::string name : {"sense1024", "concat2048", "concat2348"}) {
    std::ifstream f(run.file(name + ".usm.pred"));
    check_rows(pos_confusion(read_predictions(f), gold, inventory));
  }
  // Random USM-style runs over the full inventory when it is available, else the fixture.
  const char* wn = env("LMMS_WN30_INVENTORY");
  const auto big = wn ? Inventory::load(wn) : inventory;
  const auto keys = big.sense_keys();
  test::Gen gen(808);
  for (int t = 0; t < 50; ++t) {
    GoldKeySet g;
    std::vector<Prediction> p;
    for (std::size_t i = 0; i < 1000; ++i) {
      g[std::to_string(i)] = {keys[gen.index(keys.size())]};
      p.push_back({std::to_string(i), {keys[gen.index(keys.size())]}});
    }
    check_rows(pos_confusion(p, g, big));
  }

  std::size_t curve_violations = 0, curves = 0;
  for (const std::string name : {"sense1024", "concat2048", "concat2348"}) {
    std::istringstream lines(test::read_file(run.file(name + ".curve")));
    std::string header;
    std::getline(lines, header);
    std::vector<std::tuple<std::size_t, double, double>> points;
    std::size_t k;
    double acc, base;
    while (lines >> k >> acc >> base) points.emplace_back(k, acc, base);
    ++curves;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (std::get<1>(points[i]) < std::get<1>(points[i - 1]) || std::get<2>(points[i]) < std::get<2>(points[i - 1]))
        ++curve_violations;
    // k_max defaults to the largest candidate count among the instances.
    if (points.empty() || std::get<1>(points.back()) != 1.0 || std::get<2>(points.back()) != 1.0) ++curve_violations;
  }
  const bool ok = bad_rows == 0 && curve_violations == 0;
  return {ok ? Status::Pass : Status::Fail,
          std::to_string(bad_rows) + " of " + std::to_string(rows) + " confusion rows off 100%; " +
              std::to_string(curve_violations) + " curve violations in " + std::to_string(curves) + " fixture curves"};
}

Outcome full_scale_f1() {
  return {Status::Excluded,
          "benchmark scores need a 340M-parameter NLM and full SemCor/test-set embeddings; optional full-scale check "
          "(eval on real embeddings, ALL within 75.4 +/- 0.7)"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"coverage reproduction", coverage_reproduction},
      {"inventory statistics", inventory_statistics},
      {"k-NN oracle equivalence", knn_oracle},
      {"concatenated-cosine identity", concat_identity},
      {"propagation oracle", propagation_oracle},
      {"scorer identities", scorer_identities},
      {"determinism", determinism},
      {"confusion rows and acceptance curve", confusion_and_curve},
      {"full-scale F1 (not desk-reproducible)", full_scale_f1},
  };
  bool failed = false;
  int n = 1;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::Pass   ? "PASS"
                      : o.status == Status::Fail ? "FAIL"
                      : o.status == Status::Skip ? "SKIP"
                                                 : "EXCLUDED";
    failed = failed || o.status == Status::Fail;
    std::cout << "criterion " << n++ << " " << tag << "  " << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
