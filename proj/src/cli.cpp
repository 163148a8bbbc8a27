#include "lmms/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "lmms/analysis.hpp"
#include "lmms/corpora.hpp"
#include "lmms/embed_io.hpp"
#include "lmms/error.hpp"
#include "lmms/evalkit.hpp"
#include "lmms/inventory.hpp"
#include "lmms/knn.hpp"
#include "lmms/log.hpp"
#include "lmms/parallel.hpp"
#include "lmms/sensebuild.hpp"

namespace lmms {
namespace {

struct Options {
  std::string inventory;
  std::string corpus;
  std::string gold;
  std::string embeddings;
  std::string statics;
  std::string config;
  std::string fallback = "none";
  std::string out;
  std::string in;
  std::string index;
  std::string gloss_embeddings;
  std::string dict;
  std::string train_corpus;
  std::string train_gold;
  std::string predictions;
  std::string anchor_a;
  std::string anchor_b;
  std::string on_missing = "fail";
  std::size_t k = 0;
  bool deterministic = false;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw Error("write failed for '" + path + "'");
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

SetConfig selector(const std::string& s) {
  const auto c = parse_config_selector(s);
  if (!c) throw Error("unknown --config '" + s + "'");
  return *c;
}

SenseIndex load_index(const Options& o) {
  auto index = SenseIndex::load(o.index);
  if (!o.config.empty() && selector(o.config) != index.config())
    throw Error("--config " + o.config + " does not match index configuration " +
                std::string(to_string(index.config())));
  return index;
}

std::optional<StaticVectors> load_statics_for(SetConfig config, const Options& o) {
  if (config != SetConfig::Concat2348) return std::nullopt;
  if (o.statics.empty()) throw Error("configuration CONCAT_2348 requires --static");
  return read_static(o.statics);
}

std::unordered_map<std::string, Vector> load_token_vectors(const std::string& path) {
  std::unordered_map<std::string, Vector> out;
  for (auto& r : read_embeddings(path)) out.emplace(std::move(r.key), std::move(r.vector));
  return out;
}

Query query_for(const EvalInstance& inst, const std::unordered_map<std::string, Vector>& vectors) {
  const auto v = vectors.find(inst.token_span_id);
  if (v == vectors.end()) throw Error("no contextual embedding for instance '" + inst.instance_id + "'");
  return Query{v->second, inst.surface, inst.lemma, inst.pos};
}

std::vector<std::string> keys_of(const MatchResult& m) {
  std::vector<std::string> keys;
  keys.reserve(m.ranking.size());
  for (const auto& s : m.ranking) keys.push_back(s.key);
  return keys;
}

void report(const Options& o, std::ostream& out, const std::vector<Prediction>& predictions, const GoldKeySet& gold) {
  const auto reports = score_by_testset(predictions, gold, labels_from_ids(gold));
  print_report_table(out, reports);
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    for (const auto& [name, r] : reports) f << format_report_line(name, r) << '\n';
    finish(f, o.out);
  }
  if (!o.predictions.empty()) {
    auto f = open_out(o.predictions);
    write_predictions(f, predictions);
    finish(f, o.predictions);
  }
}

int cmd_build(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  const auto training = load_training_annotations(o.corpus, o.gold, inventory);
  EmbeddingReader reader(o.embeddings);
  BuildOptions options;
  options.dim = reader.dim();
  options.on_missing = o.on_missing == "skip" ? MissingEmbeddingPolicy::Skip : MissingEmbeddingPolicy::Fail;
  const auto set = build_from_annotations(training.annotations, records_from(reader), options);
  save_sense_set(o.out, set);
  out << "annotated senses " << set.size() << '\n';
  return 0;
}

int cmd_extend(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  const auto set = extend_full_coverage(load_sense_set(o.in), inventory);
  save_sense_set(o.out, set);
  for (const auto& [p, n] : set.provenance_counts()) out << to_string(p) << ' ' << n << '\n';
  return 0;
}

int cmd_gloss_texts(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  std::vector<std::string> keys(inventory.sense_keys().begin(), inventory.sense_keys().end());
  std::sort(keys.begin(), keys.end());
  auto write = [&](std::ostream& s) {
    for (const auto& k : keys) s << k << '\t' << compose_gloss_text(k, inventory) << '\n';
  };
  if (o.out.empty()) {
    write(out);
  } else {
    auto f = open_out(o.out);
    write(f);
    finish(f, o.out);
  }
  return 0;
}

int cmd_merge(const Options& o, std::ostream& out) {
  const auto target = selector(o.config);
  const auto inventory = Inventory::load(o.inventory);

  auto dictionary = [&] {
    if (!o.dict.empty()) return load_sense_set(o.dict);
    if (o.gloss_embeddings.empty()) throw Error("merge needs --gloss-embeddings or --dict");
    EmbeddingReader reader(o.gloss_embeddings);
    return build_dictionary_vectors(records_from(reader), inventory, reader.dim());
  };

  SenseVectorSet result;
  if (target == SetConfig::Dict1024) {
    result = dictionary();
  } else {
    if (o.in.empty()) throw Error("merge needs --in with a sense set");
    auto input = load_sense_set(o.in);
    switch (target) {
      case SetConfig::Avg1024:
        result = merge_average(input, dictionary());
        break;
      case SetConfig::Concat2048:
        result = merge_concat(input, dictionary());
        break;
      case SetConfig::Concat2348: {
        const auto statics = load_statics_for(target, o);
        if (input.config() != SetConfig::Concat2048) input = merge_concat(input, dictionary());
        result = merge_static(input, *statics, inventory);
        break;
      }
      default:
        throw Error("merge cannot produce " + std::string(to_string(target)));
    }
  }
  save_sense_set(o.out, result);
  out << to_string(result.config()) << ' ' << result.size() << " senses, dim " << result.dim() << '\n';
  return 0;
}

int cmd_index(const Options& o, std::ostream& out) {
  const auto index = SenseIndex::build(load_sense_set(o.in));
  index.save(o.out);
  out << to_string(index.config()) << ' ' << index.size() << " rows, dim " << index.dim() << '\n';
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  const auto index = load_index(o);
  const auto statics = load_statics_for(index.config(), o);
  const auto eval = load_eval_set(o.corpus, o.gold, &inventory);
  const auto vectors = load_token_vectors(o.embeddings);

  SenseFrequencies frequencies;
  Fallback fallback;
  if (o.fallback == "mfs") {
    if (o.train_corpus.empty() || o.train_gold.empty())
      throw Error("--fallback mfs requires --train-corpus and --train-gold");
    frequencies = sense_frequencies(load_training_annotations(o.train_corpus, o.train_gold, inventory).annotations);
    fallback = Fallback::mfs(frequencies);
  }

  const auto& instances = eval.instances;
  std::vector<Prediction> predictions(instances.size());
  std::vector<char> used(instances.size(), 0);
  parallel_for(instances.size(), [&](std::size_t i) {
    const auto m = disambiguate_informed(index, query_for(instances[i], vectors), inventory, fallback,
                                         statics ? &*statics : nullptr);
    predictions[i] = {instances[i].instance_id, keys_of(m)};
    used[i] = m.fallback_used;
  });
  report(o, out, predictions, eval.gold);
  if (const auto n = std::count(used.begin(), used.end(), 1)) out << "fallback used for " << n << " instances\n";
  return 0;
}

int cmd_usm_eval(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  const auto index = load_index(o);
  const auto statics = load_statics_for(index.config(), o);
  const auto eval = load_eval_set(o.corpus, o.gold, &inventory);
  const auto vectors = load_token_vectors(o.embeddings);
  const std::size_t k = o.k ? o.k : 1;

  const auto& instances = eval.instances;
  std::vector<Prediction> predictions(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) {
    const auto m = disambiguate_usm(index, query_for(instances[i], vectors), k, statics ? &*statics : nullptr);
    predictions[i] = {instances[i].instance_id, keys_of(m)};
  });
  report(o, out, predictions, eval.gold);
  return 0;
}

int cmd_curve(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  const auto index = load_index(o);
  const auto statics = load_statics_for(index.config(), o);
  const auto eval = load_eval_set(o.corpus, o.gold, &inventory);
  const auto vectors = load_token_vectors(o.embeddings);

  const auto& instances = eval.instances;
  std::vector<Prediction> predictions(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) {
    const auto m = disambiguate_informed(index, query_for(instances[i], vectors), inventory, Fallback::none(),
                                         statics ? &*statics : nullptr);
    predictions[i] = {instances[i].instance_id, keys_of(m)};
  });
  std::size_t k_max = o.k;
  if (!k_max)
    for (const auto& inst : instances) k_max = std::max(k_max, inventory.candidates(inst.lemma, inst.pos).size());
  if (!k_max) throw Error("no evaluation instances");

  const auto curve = acceptance_curve(predictions, eval.gold, instances, inventory, k_max);
  auto write = [&](std::ostream& s) {
    s << "k\taccuracy\tbaseline\n";
    for (const auto& p : curve) s << p.k << '\t' << fixed(p.accuracy, 6) << '\t' << fixed(p.baseline, 6) << '\n';
  };
  write(out);
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    write(f);
    finish(f, o.out);
  }
  return 0;
}

int cmd_confusion(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  const auto gold = read_gold_keys(o.gold);
  std::ifstream in(o.predictions);
  if (!in) throw Error("cannot open '" + o.predictions + "'");
  const auto predictions = read_predictions(in, o.predictions);
  const auto matrix = pos_confusion(predictions, gold, inventory);
  print_confusion(out, matrix);
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    print_confusion(f, matrix);
    finish(f, o.out);
  }
  return 0;
}

int cmd_bias(const Options& o, std::ostream& out) {
  const auto index = load_index(o);
  std::vector<std::pair<std::string, double>> scores(index.size());
  parallel_for(index.size(), [&](std::size_t i) {
    scores[i] = {index.key(i), bias_score(index, index.key(i), o.anchor_a, o.anchor_b).score};
  });
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  auto write = [&](std::ostream& s) {
    for (const auto& [key, v] : scores) s << key << '\t' << fixed(v, 6) << '\n';
  };
  if (o.out.empty()) {
    write(out);
  } else {
    auto f = open_out(o.out);
    write(f);
    finish(f, o.out);
  }
  return 0;
}

int cmd_coverage(const Options& o, std::ostream& out) {
  const auto inventory = Inventory::load(o.inventory);
  std::unordered_set<std::string> annotated;
  if (!o.in.empty()) {
    const auto set = load_sense_set(o.in);
    for (const auto& [key, e] : set.entries())
      if (e.provenance == Provenance::Annotated) annotated.insert(key);
  } else if (!o.gold.empty()) {
    std::size_t unknown = 0;
    for (const auto& [_, keys] : read_gold_keys(o.gold))
      for (const auto& k : keys) inventory.has_sense(k) ? (void)annotated.insert(k) : (void)++unknown;
    if (unknown) warn(std::to_string(unknown) + " gold keys are not in the inventory and were ignored");
  } else {
    throw Error("coverage needs --gold or --in");
  }
  const auto plan = plan_extension(annotated, inventory);
  for (const auto& lex : plan.fallback_lexnames) warn("lexname '" + lex + "' has no embedded synset");
  auto write = [&](std::ostream& s) {
    s << "stage\tcovered\ttotal\tpercent\n";
    for (const auto& c : coverage_report(plan, inventory))
      s << c.stage << '\t' << c.covered << '\t' << c.total << '\t' << fixed(100.0 * c.fraction(), 2) << '\n';
  };
  write(out);
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    write(f);
    finish(f, o.out);
  }
  return 0;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const auto s = Inventory::load(o.inventory).stats();
  out << "synsets " << s.synsets << '\n'
      << "senses " << s.senses << '\n'
      << "lemmas " << s.lemmas << '\n'
      << "lexnames " << s.lexnames << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sense embeddings over WordNet and nearest-neighbour word sense disambiguation", "lmms"};
  app.set_config("--run-config", "", "INI/TOML file with option defaults");
  app.require_subcommand(1);
  Options o;
  app.add_flag("--deterministic", o.deterministic, "Serial execution with a fixed summation order");

  const auto existing = CLI::ExistingFile;
  const std::vector<std::string> selectors{"1024", "2048", "2348", "avg", "dict"};
  auto inv = [&](CLI::App* c) { c->add_option("--inventory", o.inventory, "Inventory export")->required()->check(existing); };
  auto eval_inputs = [&](CLI::App* c) {
    inv(c);
    c->add_option("--index", o.index, "Sense index")->required()->check(existing);
    c->add_option("--corpus", o.corpus, "Evaluation XML")->required()->check(existing);
    c->add_option("--gold", o.gold, "Evaluation gold keys")->required()->check(existing);
    c->add_option("--embeddings", o.embeddings, "Contextual embeddings of the evaluation tokens")
        ->required()
        ->check(existing);
    c->add_option("--static", o.statics, "Static lemma vectors (2348 only)")->check(existing);
    c->add_option("--config", o.config, "Expected index configuration")->check(CLI::IsMember(selectors));
  };

  auto* build = app.add_subcommand("build", "Annotated sense vectors from a training corpus");
  inv(build);
  build->add_option("--corpus", o.corpus, "Training XML")->required()->check(existing);
  build->add_option("--gold", o.gold, "Training gold keys")->required()->check(existing);
  build->add_option("--embeddings", o.embeddings, "Contextual embeddings keyed by instance id")
      ->required()
      ->check(existing);
  build->add_option("--on-missing", o.on_missing, "Annotations without an embedding")
      ->check(CLI::IsMember({"fail", "skip"}));
  build->add_option("--out", o.out, "Output sense set")->required();

  auto* extend = app.add_subcommand("extend", "Full-coverage extension over the inventory");
  inv(extend);
  extend->add_option("--in", o.in, "Annotated sense set")->required()->check(existing);
  extend->add_option("--out", o.out, "Output sense set")->required();

  auto* gloss = app.add_subcommand("gloss-texts", "Gloss strings to embed, one per sense");
  inv(gloss);
  gloss->add_option("--out", o.out, "Output file (default stdout)");

  auto* merge = app.add_subcommand("merge", "Dictionary vectors and merged configurations");
  inv(merge);
  merge->add_option("--config", o.config, "Target configuration")->required()->check(CLI::IsMember(selectors));
  merge->add_option("--in", o.in, "Sense set (full coverage)")->check(existing);
  merge->add_option("--gloss-embeddings", o.gloss_embeddings, "Gloss token embeddings")->check(existing);
  merge->add_option("--dict", o.dict, "Prebuilt dictionary sense set")->check(existing);
  merge->add_option("--static", o.statics, "Static lemma vectors")->check(existing);
  merge->add_option("--out", o.out, "Output sense set")->required();

  auto* index = app.add_subcommand("index", "Normalized k-NN index from a sense set");
  index->add_option("--in", o.in, "Sense set")->required()->check(existing);
  index->add_option("--out", o.out, "Output index")->required();

  auto* eval = app.add_subcommand("eval", "Informed WSD evaluation");
  eval_inputs(eval);
  eval->add_option("--fallback", o.fallback, "Policy when no candidate is indexed")
      ->check(CLI::IsMember({"none", "mfs"}));
  eval->add_option("--train-corpus", o.train_corpus, "Training XML for MFS counts")->check(existing);
  eval->add_option("--train-gold", o.train_gold, "Training gold keys for MFS counts")->check(existing);
  eval->add_option("--predictions", o.predictions, "Write predictions here");
  eval->add_option("--out", o.out, "Write machine-readable report lines here");

  auto* usm = app.add_subcommand("usm-eval", "Uninformed sense matching evaluation");
  eval_inputs(usm);
  usm->add_option("--k", o.k, "Neighbours retrieved per instance")->check(CLI::PositiveNumber);
  usm->add_option("--predictions", o.predictions, "Write predictions here");
  usm->add_option("--out", o.out, "Write machine-readable report lines here");

  auto* curve = app.add_subcommand("curve", "Neighbour acceptance curve with random baseline");
  eval_inputs(curve);
  curve->add_option("--k", o.k, "Largest k (default: most candidates of any instance)")->check(CLI::PositiveNumber);
  curve->add_option("--out", o.out, "Write the curve here");

  auto* confusion = app.add_subcommand("confusion", "POS confusion matrix of predictions");
  inv(confusion);
  confusion->add_option("--gold", o.gold, "Gold keys")->required()->check(existing);
  confusion->add_option("--predictions", o.predictions, "Predictions file")->required()->check(existing);
  confusion->add_option("--out", o.out, "Write the matrix here");

  auto* bias = app.add_subcommand("bias", "Anchor bias score of every indexed sense");
  bias->add_option("--index", o.index, "Sense index")->required()->check(existing);
  bias->add_option("--config", o.config, "Index configuration")->required()->check(CLI::IsMember(selectors));
  bias->add_option("--anchor-a", o.anchor_a, "First anchor sensekey")->required();
  bias->add_option("--anchor-b", o.anchor_b, "Second anchor sensekey")->required();
  bias->add_option("--out", o.out, "Output file (default stdout)");

  auto* coverage = app.add_subcommand("coverage", "Cumulative coverage per extension stage");
  inv(coverage);
  coverage->add_option("--gold", o.gold, "Training gold keys")->check(existing);
  coverage->add_option("--in", o.in, "Annotated or extended sense set")->check(existing);
  coverage->add_option("--out", o.out, "Write the table here");

  auto* stats = app.add_subcommand("stats", "Inventory counts");
  inv(stats);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const auto previous_sink = set_warning_sink([&err](std::string_view m) { err << "warning: " << m << '\n'; });
  const bool previous_serial = serial();
  set_serial(o.deterministic || previous_serial);
  int code = 1;
  try {
    const std::pair<CLI::App*, int (*)(const Options&, std::ostream&)> commands[] = {
        {build, cmd_build},         {extend, cmd_extend}, {gloss, cmd_gloss_texts},     {merge, cmd_merge},
        {index, cmd_index},         {eval, cmd_eval},     {usm, cmd_usm_eval},          {curve, cmd_curve},
        {confusion, cmd_confusion}, {bias, cmd_bias},     {coverage, cmd_coverage},     {stats, cmd_stats},
    };
    for (const auto& [sub, fn] : commands)
      if (sub->parsed()) code = fn(o, out);
  } catch (const std::exception& e) {
    err << "lmms: error: " << e.what() << '\n';
    code = 1;
  }
  set_serial(previous_serial);
  set_warning_sink(previous_sink);
  return code;
}

}  // namespace lmms
