#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "lmms/cli.hpp"
#include "lmms/corpora.hpp"
#include "lmms/embed_io.hpp"
#include "lmms/inventory.hpp"
#include "lmms/sensebuild.hpp"

namespace lmms::test {

std::string fixture(const std::string& name) { return std::string(LMMS_FIXTURE_DIR) + "/" + name; }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("lmms-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Vector Gen::gaussian(std::size_t dim) {
  std::normal_distribution<float> d(0.0f, 1.0f);
  Vector v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = d(rng_);
  return v;
}

Vector Gen::nonzero(std::size_t dim) {
  for (;;) {
    auto v = gaussian(dim);
    if (l2_norm(v) > 1e-3) return v;
  }
}

int cli_status(const std::vector<std::string>& args, std::string* out, std::string* err) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

std::string cli(const std::vector<std::string>& args) {
  std::string out, err;
  if (cli_status(args, &out, &err) != 0) {
    std::string cmd;
    for (const auto& a : args) cmd += a + ' ';
    throw std::runtime_error("lmms " + cmd + "failed: " + err);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

FixtureInputs write_fixture_inputs(const TempDir& dir, std::uint64_t seed) {
  constexpr std::uint32_t kDim = 8;
  constexpr std::uint32_t kStaticDim = 4;
  FixtureInputs in{fixture("toy_inventory.tsv"), fixture("toy_train.xml"),  fixture("toy_train.gold.txt"),
                   fixture("toy_eval.xml"),      fixture("toy_eval.gold.txt"), dir.file("train.lmeb"),
                   dir.file("eval.lmeb"),        dir.file("gloss.lmeb"),       dir.file("static.txt")};
  Gen gen(seed);
  const auto inventory = Inventory::load(in.inventory);

  auto token_file = [&](const std::string& xml, const std::string& path) {
    EmbeddingWriter w(path, kDim);
    for (const auto& s : read_corpus_xml(xml))
      for (const auto& t : s.tokens)
        if (!t.instance_id.empty()) w.write(t.instance_id, gen.gaussian(kDim));
    w.close();
  };
  token_file(in.train_xml, in.train_embeddings);
  token_file(in.eval_xml, in.eval_embeddings);

  EmbeddingWriter gloss(in.gloss_embeddings, kDim);
  for (const auto& key : inventory.sense_keys()) {
    std::istringstream words(compose_gloss_text(key, inventory));
    std::size_t i = 0;
    for (std::string w; words >> w; ++i) gloss.write(key + "#" + std::to_string(i), gen.gaussian(kDim));
  }
  gloss.close();

  StaticVectors statics;
  statics.dim = kStaticDim;
  for (const auto& s : inventory.synsets())
    for (const auto& l : s.lemmas) statics.vectors.emplace(normalize_lemma(l), gen.nonzero(kStaticDim));
  write_static(in.statics, statics);
  return in;
}

std::vector<std::string> run_fixture_pipeline(const FixtureInputs& in, const TempDir& out) {
  const std::string d = "--deterministic";
  const auto& inv = in.inventory;
  auto f = [&](const std::string& n) { return out.file(n); };
  std::vector<std::string> artifacts;
  auto keep = [&](std::initializer_list<std::string> paths) {
    for (const auto& p : paths) {
      artifacts.push_back(p);
      if (std::filesystem::exists(p + ".meta")) artifacts.push_back(p + ".meta");
    }
  };

  cli({d, "build", "--inventory", inv, "--corpus", in.train_xml, "--gold", in.train_gold, "--embeddings",
       in.train_embeddings, "--out", f("annotated.lmeb")});
  cli({d, "extend", "--inventory", inv, "--in", f("annotated.lmeb"), "--out", f("sense1024.lmeb")});
  cli({d, "gloss-texts", "--inventory", inv, "--out", f("glosses.txt")});
  cli({d, "merge", "--inventory", inv, "--config", "dict", "--gloss-embeddings", in.gloss_embeddings, "--out",
       f("dict1024.lmeb")});
  cli({d, "merge", "--inventory", inv, "--config", "avg", "--in", f("sense1024.lmeb"), "--dict", f("dict1024.lmeb"),
       "--out", f("avg1024.lmeb")});
  cli({d, "merge", "--inventory", inv, "--config", "2048", "--in", f("sense1024.lmeb"), "--dict",
       f("dict1024.lmeb"), "--out", f("concat2048.lmeb")});
  cli({d, "merge", "--inventory", inv, "--config", "2348", "--in", f("concat2048.lmeb"), "--static", in.statics,
       "--out", f("concat2348.lmeb")});
  keep({f("annotated.lmeb"), f("sense1024.lmeb"), f("glosses.txt"), f("dict1024.lmeb"), f("avg1024.lmeb"),
        f("concat2048.lmeb"), f("concat2348.lmeb")});

  for (const std::string name : {"sense1024", "concat2048", "concat2348"}) {
    cli({d, "index", "--in", f(name + ".lmeb"), "--out", f(name + ".idx")});
    const std::vector<std::string> common{"--inventory", inv, "--index", f(name + ".idx"), "--corpus", in.eval_xml,
                                          "--gold", in.eval_gold, "--embeddings", in.eval_embeddings, "--static",
                                          in.statics};
    auto run = [&](std::vector<std::string> head, std::vector<std::string> tail) {
      head.insert(head.end(), common.begin(), common.end());
      head.insert(head.end(), tail.begin(), tail.end());
      cli(head);
    };
    run({d, "eval"}, {"--fallback", "mfs", "--train-corpus", in.train_xml, "--train-gold", in.train_gold,
                      "--predictions", f(name + ".eval.pred"), "--out", f(name + ".eval.report")});
    run({d, "usm-eval"}, {"--predictions", f(name + ".usm.pred"), "--out", f(name + ".usm.report")});
    run({d, "curve"}, {"--out", f(name + ".curve")});
    cli({d, "confusion", "--inventory", inv, "--gold", in.eval_gold, "--predictions", f(name + ".usm.pred"),
         "--out", f(name + ".confusion")});
    keep({f(name + ".idx"), f(name + ".eval.pred"), f(name + ".eval.report"), f(name + ".usm.pred"),
          f(name + ".usm.report"), f(name + ".curve"), f(name + ".confusion")});
  }
  cli({d, "bias", "--index", f("sense1024.idx"), "--config", "1024", "--anchor-a", "dog%1:05:00::", "--anchor-b",
       "device%1:06:00::", "--out", f("bias.tsv")});
  cli({d, "coverage", "--inventory", inv, "--gold", in.train_gold, "--out", f("coverage.tsv")});
  keep({f("bias.tsv"), f("coverage.tsv")});
  return artifacts;
}

}  // namespace lmms::test

namespace lmms::test {

Vector unit_vector(Gen& gen, std::size_t dim) {
  for (;;) {
    const Vector v = gen.nonzero(dim);
    long double sq = 0;
    for (float x : v) sq += static_cast<long double>(x) * x;
    const long double n = std::sqrt(sq);
    Vector u(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = static_cast<float>(v[i] / n);
    if (std::abs(l2_norm(u) - 1.0) <= kUnitTolerance) return u;
  }
}

SyntheticWorld synthetic_world(std::uint64_t seed, std::size_t senses, std::size_t dim,
                               std::size_t senses_per_lemma) {
  Gen gen(seed);
  std::vector<SynsetRecord> records;
  SenseVectorSet set(SetConfig::Sense1024, dim);
  std::vector<std::string> lemmas;
  Vector previous;
  for (std::size_t i = 0; i < senses; ++i) {
    const auto lemma_index = i / senses_per_lemma;
    const auto lemma = "w" + std::to_string(lemma_index);
    if (i % senses_per_lemma == 0) lemmas.push_back(lemma);
    char lexid[24];
    std::snprintf(lexid, sizeof lexid, "%02zu", i % senses_per_lemma);
    SynsetRecord r;
    r.id = std::to_string(20000000 + i) + "n";
    r.lexname = "noun.tops";
    r.lemmas = {lemma};
    r.senses = {lemma + "%1:03:" + lexid + "::"};
    r.gloss = "synthetic";
    Vector v = (i % 50 == 49) ? previous : unit_vector(gen, dim);
    set.insert(r.senses.front(), {v, Provenance::Annotated, 1});
    previous = v;
    records.push_back(std::move(r));
  }
  return {Inventory::from_records(std::move(records)), std::move(set), std::move(lemmas)};
}

std::vector<std::string> oracle_rank(const SenseVectorSet& set, const Vector& query, std::size_t k,
                                     const std::vector<std::string>& only) {
  auto cos = [&](const Vector& v) {
    long double dot = 0, a = 0, b = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      dot += static_cast<long double>(v[i]) * query[i];
      a += static_cast<long double>(v[i]) * v[i];
      b += static_cast<long double>(query[i]) * query[i];
    }
    return dot / std::sqrt(a * b);
  };
  std::vector<std::pair<long double, std::string>> scored;
  for (const auto& [key, e] : set.entries())
    if (only.empty() || std::find(only.begin(), only.end(), key) != only.end()) scored.emplace_back(cos(e.vector), key);
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) keys.push_back(scored[i].second);
  return keys;
}

}  // namespace lmms::test
