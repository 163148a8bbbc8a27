#include "lmms/corpora.hpp"

#include <expat.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

#include "lmms/error.hpp"
#include "lmms/inventory.hpp"
#include "lmms/log.hpp"

namespace lmms {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const char* attribute(const XML_Char** atts, const char* name) {
  for (std::size_t i = 0; atts[i]; i += 2)
    if (std::strcmp(atts[i], name) == 0) return atts[i + 1];
  return nullptr;
}

class CorpusHandler {
 public:
  CorpusHandler(XML_Parser parser, std::string source) : parser_(parser), source_(std::move(source)) {}

  static void XMLCALL on_start(void* self, const XML_Char* name, const XML_Char** atts) {
    static_cast<CorpusHandler*>(self)->start(name, atts);
  }
  static void XMLCALL on_end(void* self, const XML_Char* name) { static_cast<CorpusHandler*>(self)->end(name); }
  static void XMLCALL on_text(void* self, const XML_Char* s, int len) {
    auto* h = static_cast<CorpusHandler*>(self);
    if (h->in_token_) h->text_.append(s, static_cast<std::size_t>(len));
  }

  std::vector<CorpusSentence> sentences;
  std::optional<ParseError> error;

 private:
  void fail(const std::string& what) {
    if (!error) error.emplace(source_, XML_GetCurrentLineNumber(parser_), what);
    XML_StopParser(parser_, XML_FALSE);
  }

  void start(const char* name, const XML_Char** atts) {
    if (error) return;
    if (std::strcmp(name, "text") == 0) {
      const char* id = attribute(atts, "id");
      doc_id_ = id ? id : "";
    } else if (std::strcmp(name, "sentence") == 0) {
      const char* id = attribute(atts, "id");
      if (!id) return fail("<sentence> without id");
      CorpusSentence s;
      s.doc_id = doc_id_;
      s.sent_id = id;
      sentences.push_back(std::move(s));
      in_sentence_ = true;
    } else if (std::strcmp(name, "wf") == 0 || std::strcmp(name, "instance") == 0) {
      if (!in_sentence_) return fail(std::string("<") + name + "> outside <sentence>");
      const bool is_instance = name[0] == 'i';
      CorpusToken t;
      if (const char* lemma = attribute(atts, "lemma")) t.lemma = lemma;
      if (const char* pos = attribute(atts, "pos")) t.pos = parse_pos(pos);
      if (is_instance) {
        const char* id = attribute(atts, "id");
        if (!id || !*id) return fail("<instance> without id");
        t.instance_id = id;
        if (t.lemma.empty()) return fail("instance '" + t.instance_id + "' without lemma");
        if (!t.pos) return fail("instance '" + t.instance_id + "' has a missing or unknown pos");
      }
      current_ = std::move(t);
      text_.clear();
      in_token_ = true;
    }
  }

  void end(const char* name) {
    if (error) return;
    if (std::strcmp(name, "wf") == 0 || std::strcmp(name, "instance") == 0) {
      current_.surface = trim(text_);
      sentences.back().tokens.push_back(std::move(current_));
      in_token_ = false;
    } else if (std::strcmp(name, "sentence") == 0) {
      in_sentence_ = false;
    }
  }

  XML_Parser parser_;
  std::string source_;
  std::string doc_id_;
  CorpusToken current_;
  std::string text_;
  bool in_sentence_ = false;
  bool in_token_ = false;
};

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

}  // namespace

std::vector<CorpusSentence> parse_corpus_xml(std::istream& in, const std::string& source) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                       &XML_ParserFree);
  if (!parser) throw Error("cannot allocate XML parser");
  CorpusHandler handler(parser.get(), source);
  XML_SetUserData(parser.get(), &handler);
  XML_SetElementHandler(parser.get(), &CorpusHandler::on_start, &CorpusHandler::on_end);
  XML_SetCharacterDataHandler(parser.get(), &CorpusHandler::on_text);

  std::vector<char> buffer(1 << 16);
  while (true) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<int>(in.gcount());
    const bool last = got == 0 || in.eof();
    if (XML_Parse(parser.get(), buffer.data(), got, last ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
      if (handler.error) throw *handler.error;
      throw ParseError(source, XML_GetCurrentLineNumber(parser.get()),
                       std::string("XML error: ") + XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (handler.error) throw *handler.error;
    if (last) break;
  }
  return std::move(handler.sentences);
}

std::vector<CorpusSentence> read_corpus_xml(const std::string& path) {
  auto in = open_input(path, "corpus");
  return parse_corpus_xml(in, path);
}

GoldKeySet parse_gold_keys(std::istream& in, const std::string& source) {
  GoldKeySet gold;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id)) continue;
    std::vector<std::string> keys;
    std::string key;
    while (fields >> key)
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    if (keys.empty()) throw ParseError(source, lineno, "instance '" + id + "' has no gold key");
    if (!gold.emplace(id, std::move(keys)).second)
      throw ParseError(source, lineno, "duplicate gold entry for '" + id + "'");
  }
  return gold;
}

GoldKeySet read_gold_keys(const std::string& path) {
  auto in = open_input(path, "gold key file");
  return parse_gold_keys(in, path);
}

TrainingCorpus join_training(std::vector<CorpusSentence> sentences, const GoldKeySet& gold,
                             const Inventory& inventory, UnresolvedPolicy policy, const std::string& source) {
  TrainingCorpus out;
  std::unordered_set<std::string> seen;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (t.instance_id.empty()) continue;
      if (!seen.insert(t.instance_id).second)
        throw Error(source + ": duplicate instance id '" + t.instance_id + "'");
      const auto it = gold.find(t.instance_id);
      if (it == gold.end()) {
        if (policy == UnresolvedPolicy::Fail) throw Error(source + ": no gold key for '" + t.instance_id + "'");
        warn(source + ": no gold key for '" + t.instance_id + "', skipped");
        continue;
      }
      AnnotatedToken a{s.doc_id, s.sent_id, t.instance_id, t.surface, t.lemma, *t.pos, {}};
      for (const auto& key : it->second) {
        if (inventory.has_sense(key)) {
          a.gold_senses.push_back(key);
        } else if (policy == UnresolvedPolicy::Fail) {
          throw Error(source + ": unresolvable sensekey '" + key + "' for '" + t.instance_id + "'");
        } else {
          warn(source + ": unresolvable sensekey '" + key + "' for '" + t.instance_id + "', dropped");
        }
      }
      if (!a.gold_senses.empty()) out.annotations.push_back(std::move(a));
    }
  }
  for (const auto& [id, _] : gold)
    if (!seen.contains(id)) throw Error(source + ": gold key for unknown instance '" + id + "'");
  out.sentences = std::move(sentences);
  return out;
}

TrainingCorpus load_training_annotations(const std::string& xml_path, const std::string& gold_path,
                                         const Inventory& inventory, UnresolvedPolicy policy) {
  return join_training(read_corpus_xml(xml_path), read_gold_keys(gold_path), inventory, policy, xml_path);
}

EvalSet join_eval(std::vector<CorpusSentence> sentences, GoldKeySet gold, const Inventory* inventory,
                  const std::string& source) {
  EvalSet out;
  std::unordered_set<std::string> seen;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (t.instance_id.empty()) continue;
      if (!seen.insert(t.instance_id).second)
        throw Error(source + ": duplicate instance id '" + t.instance_id + "'");
      const auto it = gold.find(t.instance_id);
      if (it == gold.end()) throw Error(source + ": no gold key for '" + t.instance_id + "'");
      if (inventory)
        for (const auto& key : it->second)
          if (!inventory->has_sense(key))
            throw Error(source + ": unresolvable gold sensekey '" + key + "' for '" + t.instance_id + "'");
      out.instances.push_back({t.instance_id, t.lemma, *t.pos, s.doc_id, s.sent_id, t.instance_id, t.surface});
    }
  }
  for (const auto& [id, _] : gold)
    if (!seen.contains(id)) throw Error(source + ": gold key for unknown instance '" + id + "'");
  out.sentences = std::move(sentences);
  out.gold = std::move(gold);
  return out;
}

EvalSet load_eval_set(const std::string& xml_path, const std::string& gold_path, const Inventory* inventory) {
  return join_eval(read_corpus_xml(xml_path), read_gold_keys(gold_path), inventory, xml_path);
}

SenseFrequencies sense_frequencies(const std::vector<AnnotatedToken>& annotations) {
  SenseFrequencies freqs;
  for (const auto& a : annotations) {
    auto& bucket = freqs[{normalize_lemma(a.lemma), a.pos}];
    for (const auto& key : a.gold_senses) ++bucket[key];
  }
  return freqs;
}

}  // namespace lmms
