#include <doctest.h>

#include <filesystem>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace lmms;
using test::cli;
using test::cli_status;

TEST_CASE("stats and coverage on the toy inventory") {
  const auto inv = test::fixture("toy_inventory.tsv");
  CHECK(cli({"stats", "--inventory", inv}) == "synsets 6\nsenses 9\nlemmas 8\nlexnames 2\n");
  CHECK(cli({"coverage", "--inventory", inv, "--gold", test::fixture("toy_train.gold.txt")}) ==
        "stage\tcovered\ttotal\tpercent\n"
        "annotated\t3\t9\t33.33\n"
        "synset\t5\t9\t55.56\n"
        "hypernym\t7\t9\t77.78\n"
        "lexname\t9\t9\t100.00\n");
}

TEST_CASE("gloss texts are keyed by sensekey") {
  const auto out = cli({"gloss-texts", "--inventory", test::fixture("toy_inventory.tsv")});
  CHECK(out.starts_with("animal%1:05:00::\tanimal - animal beast - a living organism"));
  CHECK(std::count(out.begin(), out.end(), '\n') == 9);
}

TEST_CASE("full fixture pipeline") {
  test::TempDir in_dir, out_dir;
  const auto in = test::write_fixture_inputs(in_dir);
  const auto artifacts = test::run_fixture_pipeline(in, out_dir);
  for (const auto& a : artifacts) CHECK(std::filesystem::exists(a));

  // Full coverage: every eval instance is answered, so P == R == F1.
  const auto report = test::read_file(out_dir.file("sense1024.eval.report"));
  CHECK(report.find("ALL ") == 0);
  CHECK(report.find(" 6 6\n") != std::string::npos);
  CHECK(report.find("toy ") != std::string::npos);

  const auto bias = test::read_file(out_dir.file("bias.tsv"));
  std::istringstream lines(bias);
  std::vector<std::pair<std::string, double>> rows;
  for (std::string key, score; lines >> key >> score;) rows.emplace_back(key, std::stod(score));
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].second >= rows[i].second);
  // the anchor itself carries the largest score
  const auto anchor = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.first == "dog%1:05:00::"; });
  REQUIRE(anchor != rows.end());
  CHECK(anchor->second == rows.front().second);

  const auto curve = test::read_file(out_dir.file("sense1024.curve"));
  CHECK(curve.starts_with("k\taccuracy\tbaseline\n1\t"));
  CHECK(curve.find("2\t1.000000\t1.000000\n") != std::string::npos);
}

TEST_CASE("preconditions fail with a diagnostic") {
  const auto inv = test::fixture("toy_inventory.tsv");
  std::string out, err;
  CHECK(cli_status({"stats", "--inventory", "/nonexistent"}, &out, &err) != 0);
  CHECK(err.find("--inventory") != std::string::npos);
  CHECK(cli_status({"bogus"}) != 0);
  CHECK(cli_status({}) != 0);

  test::TempDir dir;
  const auto in = test::write_fixture_inputs(dir);
  CHECK(cli_status({"build", "--inventory", inv, "--corpus", in.train_xml, "--gold", in.train_gold, "--embeddings",
                    in.eval_embeddings, "--out", dir.file("x.lmeb")},
                   &out, &err) != 0);
  CHECK(err.find("without an embedding") != std::string::npos);

  cli({"build", "--inventory", inv, "--corpus", in.train_xml, "--gold", in.train_gold, "--embeddings",
       in.train_embeddings, "--out", dir.file("a.lmeb")});
  cli({"index", "--in", dir.file("a.lmeb"), "--out", dir.file("a.idx")});
  // bias requires an explicit, matching configuration
  CHECK(cli_status({"bias", "--index", dir.file("a.idx"), "--anchor-a", "dog%1:05:00::", "--anchor-b",
                    "device%1:06:00::"}) != 0);
  CHECK(cli_status({"bias", "--index", dir.file("a.idx"), "--config", "2048", "--anchor-a", "dog%1:05:00::",
                    "--anchor-b", "device%1:06:00::"},
                   &out, &err) != 0);
  CHECK(err.find("does not match") != std::string::npos);
  // 2348 needs static vectors
  CHECK(cli_status({"merge", "--inventory", inv, "--config", "2348", "--in", dir.file("a.lmeb"), "--gloss-embeddings",
                    in.gloss_embeddings, "--out", dir.file("b.lmeb")},
                   &out, &err) != 0);
}

TEST_CASE("eval with no answers reports zero recall") {
  test::TempDir dir;
  const auto in = test::write_fixture_inputs(dir);
  const auto inv = test::fixture("toy_inventory.tsv");
  // An annotated-only index lacks most eval candidates; without a fallback, abstain.
  cli({"build", "--inventory", inv, "--corpus", in.train_xml, "--gold", in.train_gold, "--embeddings",
       in.train_embeddings, "--out", dir.file("a.lmeb")});
  std::ofstream(dir.file("g.txt")) << "toy.d000.s000.t000 pug%1:05:00::\n";
  std::ofstream(dir.file("e.xml"))
      << "<corpus><text id=\"toy.d000\"><sentence id=\"toy.d000.s000\">"
         "<instance id=\"toy.d000.s000.t000\" lemma=\"pug\" pos=\"NOUN\">pug</instance></sentence></text></corpus>";
  cli({"index", "--in", dir.file("a.lmeb"), "--out", dir.file("a.idx")});
  cli({"eval", "--inventory", inv, "--index", dir.file("a.idx"), "--corpus", dir.file("e.xml"), "--gold",
       dir.file("g.txt"), "--embeddings", in.eval_embeddings, "--out", dir.file("r.txt")});
  CHECK(test::read_file(dir.file("r.txt")) == "ALL 0.0 0.0 0.0 0 1\ntoy 0.0 0.0 0.0 0 1\n");

  cli({"eval", "--inventory", inv, "--index", dir.file("a.idx"), "--corpus", dir.file("e.xml"), "--gold",
       dir.file("g.txt"), "--embeddings", in.eval_embeddings, "--fallback", "mfs", "--train-corpus", in.train_xml,
       "--train-gold", in.train_gold, "--out", dir.file("r.txt")});
  CHECK(test::read_file(dir.file("r.txt")) == "ALL 100.0 100.0 100.0 1 1\ntoy 100.0 100.0 100.0 1 1\n");
}

TEST_CASE("threaded runs produce the same artifacts as deterministic ones") {
  test::TempDir in_dir, serial_dir, threaded_dir;
  const auto in = test::write_fixture_inputs(in_dir, 99);
  const auto a = test::run_fixture_pipeline(in, serial_dir);
  ::setenv("LMMS_THREADS", "3", 1);
  const auto inv = in.inventory;
  auto f = [&](const std::string& n) { return threaded_dir.file(n); };
  cli({"build", "--inventory", inv, "--corpus", in.train_xml, "--gold", in.train_gold, "--embeddings",
       in.train_embeddings, "--out", f("annotated.lmeb")});
  cli({"extend", "--inventory", inv, "--in", f("annotated.lmeb"), "--out", f("sense1024.lmeb")});
  cli({"merge", "--inventory", inv, "--config", "dict", "--gloss-embeddings", in.gloss_embeddings, "--out",
       f("dict1024.lmeb")});
  cli({"merge", "--inventory", inv, "--config", "2348", "--in", f("sense1024.lmeb"), "--dict", f("dict1024.lmeb"),
       "--static", in.statics, "--out", f("concat2348.lmeb")});
  cli({"index", "--in", f("concat2348.lmeb"), "--out", f("concat2348.idx")});
  cli({"eval", "--inventory", inv, "--index", f("concat2348.idx"), "--corpus", in.eval_xml, "--gold", in.eval_gold,
       "--embeddings", in.eval_embeddings, "--static", in.statics, "--predictions", f("concat2348.eval.pred")});
  ::unsetenv("LMMS_THREADS");
  for (const std::string name : {"sense1024.lmeb", "concat2348.lmeb", "concat2348.idx", "concat2348.eval.pred"}) {
    CAPTURE(name);
    CHECK(test::read_file(serial_dir.file(name)) == test::read_file(f(name)));
  }
}

TEST_CASE("options can come from a run config file") {
  test::TempDir dir;
  std::ofstream(dir.file("run.ini")) << "[stats]\ninventory=" << test::fixture("toy_inventory.tsv") << "\n";
  CHECK(cli({"--run-config", dir.file("run.ini"), "stats"}).starts_with("synsets 6\n"));
}
