#include "intrarel/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "intrarel/error.h"
#include "intrarel/parse_tree.h"
#include "intrarel/random.h"

namespace intrarel {

using nlohmann::json;

std::string_view to_string(Provenance p) {
  return p == Provenance::kImplicit ? "Implicit" : "AltLex";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "Implicit") return Provenance::kImplicit;
  if (text == "AltLex") return Provenance::kAltLex;
  throw ValidationError("unknown provenance '" + std::string(text) + "'");
}

std::size_t GoldRelation::leftmost_start() const {
  return std::min(arg1_spans.front().start, arg2_spans.front().start);
}

bool GoldRelation::arg1_first() const {
  return arg1_spans.front().start < arg2_spans.front().start;
}

std::string AnnotatedSentence::key() const {
  return doc_id + "#" + std::to_string(sent_index);
}

namespace {

std::string where(const AnnotatedSentence& s) {
  return "sentence " + s.doc_id + "/" + std::to_string(s.sent_index);
}

void check_spans(const AnnotatedSentence& s, const std::vector<Span>& spans, const char* role,
                 std::size_t rel) {
  const std::string ctx = where(s) + " relation " + std::to_string(rel) + " " + role;
  if (spans.empty()) throw ValidationError(ctx + ": empty span list");
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& sp = spans[i];
    if (sp.start >= sp.end) throw ValidationError(ctx + ": empty or inverted span");
    if (sp.end > s.tokens.size()) {
      throw ValidationError(ctx + ": span [" + std::to_string(sp.start) + ", " +
                            std::to_string(sp.end) + ") exceeds " +
                            std::to_string(s.tokens.size()) + " tokens");
    }
    if (i > 0 && spans[i - 1].end > sp.start) {
      throw ValidationError(ctx + ": spans overlap or are unsorted");
    }
  }
}

bool overlaps(const std::vector<Span>& a, const std::vector<Span>& b) {
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x.start < y.end && y.start < x.end) return true;
    }
  }
  return false;
}

std::vector<Span> spans_from_json(const json& j) {
  std::vector<Span> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ParseError("span must be a [start, end) pair");
    auto a = p[0].get<long long>();
    auto b = p[1].get<long long>();
    if (a < 0 || b < 0) throw ParseError("span indices must be non-negative");
    out.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
  }
  return out;
}

json spans_to_json(const std::vector<Span>& spans) {
  json out = json::array();
  for (const auto& s : spans) out.push_back({s.start, s.end});
  return out;
}

json sentence_to_json(const AnnotatedSentence& s) {
  json rels = json::array();
  for (const auto& r : s.relations) {
    rels.push_back({{"arg1_spans", spans_to_json(r.arg1_spans)},
                    {"arg2_spans", spans_to_json(r.arg2_spans)},
                    {"sense", std::string(to_string(r.sense))},
                    {"provenance", std::string(to_string(r.provenance))},
                    {"linked", r.linked_to_explicit}});
  }
  return {{"doc_id", s.doc_id},
          {"sent_index", s.sent_index},
          {"tokens", s.tokens},
          {"parse", s.parse},
          {"relations", rels}};
}

AnnotatedSentence sentence_from_json(const json& j) {
  AnnotatedSentence s;
  s.doc_id = j.at("doc_id").get<std::string>();
  auto idx = j.at("sent_index").get<long long>();
  if (idx < 0) throw ParseError("sent_index must be non-negative");
  s.sent_index = static_cast<std::size_t>(idx);
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  s.parse = j.value("parse", std::string());
  if (j.contains("relations")) {
    for (const auto& jr : j.at("relations")) {
      GoldRelation r;
      r.arg1_spans = spans_from_json(jr.at("arg1_spans"));
      r.arg2_spans = spans_from_json(jr.at("arg2_spans"));
      r.sense = parse_sense(jr.at("sense").get<std::string>());
      r.provenance = parse_provenance(jr.value("provenance", std::string("Implicit")));
      r.linked_to_explicit = jr.value("linked", false);
      s.relations.push_back(std::move(r));
    }
  }
  return s;
}

// Reads one JSON object per non-blank line, converting library exceptions
// into ParseError tagged with the line number.
template <typename F>
void for_each_json_line(std::istream& in, F&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    try {
      fn(j, lineno);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), lineno);
    } catch (const json::exception& e) {
      throw ParseError(std::string("schema error: ") + e.what(), lineno);
    }
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

}  // namespace

void validate(const AnnotatedSentence& s) {
  if (s.tokens.empty()) throw ValidationError(where(s) + ": no tokens");
  if (s.has_parse()) {
    std::size_t n = 0;
    try {
      n = count_terminals(s.parse);
    } catch (const ParseError& e) {
      throw ValidationError(where(s) + ": bad parse: " + e.what());
    }
    if (n != s.tokens.size()) {
      throw ValidationError(where(s) + ": parse has " + std::to_string(n) +
                            " terminals but sentence has " + std::to_string(s.tokens.size()) +
                            " tokens");
    }
  }
  for (std::size_t i = 0; i < s.relations.size(); ++i) {
    const auto& r = s.relations[i];
    check_spans(s, r.arg1_spans, "Arg1", i);
    check_spans(s, r.arg2_spans, "Arg2", i);
    if (overlaps(r.arg1_spans, r.arg2_spans)) {
      throw ValidationError(where(s) + " relation " + std::to_string(i) +
                            ": Arg1 and Arg2 overlap");
    }
  }
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  for_each_json_line(in, [&](const json& j, std::size_t) {
    auto s = sentence_from_json(j);
    validate(s);
    corpus.push_back(std::move(s));
  });
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus) out << sentence_to_json(s).dump() << '\n';
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  auto out = open_out(path);
  write_corpus(out, corpus);
}

bool is_eligible(const GoldRelation& r, const D1Options& opts) {
  if (r.linked_to_explicit) return false;
  if (opts.skip_discontinuous && !r.continuous()) return false;
  return true;
}

std::vector<std::size_t> eligible_relations(const AnnotatedSentence& s, const D1Options& opts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.relations.size(); ++i) {
    if (is_eligible(s.relations[i], opts)) out.push_back(i);
  }
  return out;
}

std::vector<ArgumentSpan> relation_spans(const GoldRelation& r) {
  std::vector<ArgumentSpan> out;
  for (const auto& sp : r.arg1_spans) out.push_back({Role::kArg1, sp});
  for (const auto& sp : r.arg2_spans) out.push_back({Role::kArg2, sp});
  std::sort(out.begin(), out.end(),
            [](const ArgumentSpan& a, const ArgumentSpan& b) { return a.span < b.span; });
  return out;
}

TagSequence relation_tags(const GoldRelation& r, std::size_t length) {
  return spans_to_tags(relation_spans(r), length);
}

std::string D1Example::key() const {
  return sentence.key() + "#" + (source_relation ? std::to_string(*source_relation) : "-");
}

std::vector<D1Example> generate_d1(const Corpus& corpus, const D1Options& opts) {
  std::vector<D1Example> out;
  for (const auto& s : corpus) {
    auto rels = eligible_relations(s, opts);
    if (rels.empty()) {
      out.push_back({s, TagSequence(s.tokens.size(), BioLabel::kO), std::nullopt});
      continue;
    }
    for (auto i : rels) out.push_back({s, relation_tags(s.relations[i], s.tokens.size()), i});
  }
  return out;
}

std::string D2Example::key() const { return doc_id + "#" + std::to_string(sent_index); }

D2Example make_d2(const AnnotatedSentence& s, const GoldRelation& r) {
  D2Example ex;
  ex.doc_id = s.doc_id;
  ex.sent_index = s.sent_index;
  ex.arg1_spans = r.arg1_spans;
  ex.arg2_spans = r.arg2_spans;
  for (const auto& sp : r.arg1_spans) {
    for (auto j = sp.start; j < sp.end; ++j) ex.arg1_tokens.push_back(s.tokens[j]);
  }
  for (const auto& sp : r.arg2_spans) {
    for (auto j = sp.start; j < sp.end; ++j) ex.arg2_tokens.push_back(s.tokens[j]);
  }
  ex.parse = s.parse;
  ex.sense = r.sense;
  ex.provenance = r.provenance;
  return ex;
}

std::vector<D2Example> generate_d2(const Corpus& corpus, const D1Options& opts) {
  std::vector<D2Example> out;
  for (const auto& s : corpus) {
    for (auto i : eligible_relations(s, opts)) out.push_back(make_d2(s, s.relations[i]));
  }
  return out;
}

void save_d1(const std::filesystem::path& path, const std::vector<D1Example>& d1) {
  auto out = open_out(path);
  for (const auto& ex : d1) {
    json j = sentence_to_json(ex.sentence);
    j["tags"] = tags_to_strings(ex.tags);
    j["source_relation"] = ex.source_relation ? json(*ex.source_relation) : json(nullptr);
    out << j.dump() << '\n';
  }
}

std::vector<D1Example> load_d1(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<D1Example> out;
  for_each_json_line(in, [&](const json& j, std::size_t) {
    D1Example ex;
    ex.sentence = sentence_from_json(j);
    validate(ex.sentence);
    ex.tags = tags_from_strings(j.at("tags").get<std::vector<std::string>>());
    if (ex.tags.size() != ex.sentence.tokens.size()) {
      throw ValidationError(ex.sentence.key() + ": tag count differs from token count");
    }
    if (j.contains("source_relation") && !j["source_relation"].is_null()) {
      auto r = j["source_relation"].get<std::size_t>();
      if (r >= ex.sentence.relations.size()) {
        throw ValidationError(ex.sentence.key() + ": source_relation out of range");
      }
      ex.source_relation = r;
    }
    out.push_back(std::move(ex));
  });
  return out;
}

void save_d2(const std::filesystem::path& path, const std::vector<D2Example>& d2) {
  auto out = open_out(path);
  for (const auto& ex : d2) {
    json j = {{"doc_id", ex.doc_id},
              {"sent_index", ex.sent_index},
              {"arg1_tokens", ex.arg1_tokens},
              {"arg2_tokens", ex.arg2_tokens},
              {"arg1_spans", spans_to_json(ex.arg1_spans)},
              {"arg2_spans", spans_to_json(ex.arg2_spans)},
              {"parse", ex.parse},
              {"sense", std::string(to_string(ex.sense))},
              {"provenance", std::string(to_string(ex.provenance))}};
    out << j.dump() << '\n';
  }
}

std::vector<D2Example> load_d2(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<D2Example> out;
  for_each_json_line(in, [&](const json& j, std::size_t) {
    D2Example ex;
    ex.doc_id = j.value("doc_id", std::string());
    ex.sent_index = j.value("sent_index", std::size_t{0});
    ex.arg1_tokens = j.at("arg1_tokens").get<std::vector<std::string>>();
    ex.arg2_tokens = j.at("arg2_tokens").get<std::vector<std::string>>();
    if (ex.arg1_tokens.empty() || ex.arg2_tokens.empty()) {
      throw ValidationError(ex.key() + ": empty argument");
    }
    if (j.contains("arg1_spans")) ex.arg1_spans = spans_from_json(j["arg1_spans"]);
    if (j.contains("arg2_spans")) ex.arg2_spans = spans_from_json(j["arg2_spans"]);
    ex.parse = j.value("parse", std::string());
    ex.sense = parse_sense(j.at("sense").get<std::string>());
    ex.provenance = parse_provenance(j.value("provenance", std::string("Implicit")));
    out.push_back(std::move(ex));
  });
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus, const D1Options& opts) {
  CorpusStats st;
  st.total_sentences = corpus.size();
  for (const auto& s : corpus) {
    auto rels = eligible_relations(s, opts);
    st.sentences_by_relation_count[rels.size()].count++;
    for (auto i : rels) {
      st.sense_histogram[s.relations[i].sense].count++;
      st.total_relations++;
    }
  }
  for (auto& [k, v] : st.sentences_by_relation_count) {
    v.percentage = 100.0 * static_cast<double>(v.count) / static_cast<double>(st.total_sentences);
  }
  for (auto& [k, v] : st.sense_histogram) {
    v.percentage = 100.0 * static_cast<double>(v.count) / static_cast<double>(st.total_relations);
  }
  return st;
}

std::string format_stats(const CorpusStats& st) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::left << std::setw(22) << "Number of relations" << std::right << std::setw(10)
     << "Count" << std::setw(10) << "%" << '\n';
  for (const auto& [k, v] : st.sentences_by_relation_count) {
    os << std::left << std::setw(22) << k << std::right << std::setw(10) << v.count
       << std::setw(9) << v.percentage << "%\n";
  }
  os << std::left << std::setw(22) << "total" << std::right << std::setw(10)
     << st.total_sentences << std::setw(9) << (st.total_sentences ? 100.0 : 0.0) << "%\n\n";
  os << std::left << std::setw(34) << "Sense" << std::right << std::setw(10) << "Count"
     << std::setw(10) << "%" << '\n';
  for (const auto& [k, v] : st.sense_histogram) {
    os << std::left << std::setw(34) << to_string(k) << std::right << std::setw(10) << v.count
       << std::setw(9) << v.percentage << "%\n";
  }
  os << std::left << std::setw(34) << "total" << std::right << std::setw(10)
     << st.total_relations << '\n';
  return os.str();
}

namespace {

// Largest-remainder apportionment of n items over the given ratios.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(sizes[i]);
    used += sizes[i];
  }
  while (used < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (rem[i] > rem[best] + 1e-12) best = i;
    }
    sizes[best]++;
    rem[best] = -1.0;
    used++;
  }
  return sizes;
}

}  // namespace

Split split_random(const Corpus& corpus, std::array<double, 3> ratios, std::uint64_t seed,
                   SplitUnit unit) {
  double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  Rng rng(seed);
  Split out;
  std::array<Corpus*, 3> parts = {&out.train, &out.dev, &out.test};
  if (unit == SplitUnit::kSentence) {
    std::vector<std::size_t> idx(corpus.size());
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    auto sizes = apportion(corpus.size(), ratios);
    std::size_t pos = 0;
    for (int p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < sizes[p]; ++i) parts[p]->push_back(corpus[idx[pos++]]);
    }
    return out;
  }
  // Document unit: shuffle documents (in first-appearance order), then fill
  // parts in order until each reaches its sentence quota.
  std::vector<std::string> docs;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& m = members[corpus[i].doc_id];
    if (m.empty()) docs.push_back(corpus[i].doc_id);
    m.push_back(i);
  }
  shuffle(docs, rng);
  auto quota = apportion(corpus.size(), ratios);
  int p = 0;
  std::size_t filled = 0;
  for (const auto& d : docs) {
    while (p < 2 && filled >= quota[p]) {
      ++p;
      filled = 0;
    }
    for (auto i : members[d]) parts[p]->push_back(corpus[i]);
    filled += members[d].size();
  }
  return out;
}

std::vector<Split> kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("kfold requires k >= 2");
  if (corpus.size() < k) {
    throw ConfigError("corpus of " + std::to_string(corpus.size()) +
                      " sentences is smaller than k = " + std::to_string(k));
  }
  Rng rng(seed);
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  shuffle(idx, rng);
  std::vector<std::vector<std::size_t>> blocks(k);
  std::size_t base = corpus.size() / k, extra = corpus.size() % k, pos = 0;
  for (std::size_t b = 0; b < k; ++b) {
    std::size_t len = base + (b < extra ? 1 : 0);
    blocks[b].assign(idx.begin() + static_cast<long>(pos), idx.begin() + static_cast<long>(pos + len));
    pos += len;
  }
  std::vector<Split> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t dev_block = (f + 1) % k;
    for (std::size_t b = 0; b < k; ++b) {
      Corpus& dst = b == f ? folds[f].test : b == dev_block ? folds[f].dev : folds[f].train;
      for (auto i : blocks[b]) dst.push_back(corpus[i]);
    }
  }
  return folds;
}

}  // namespace intrarel
