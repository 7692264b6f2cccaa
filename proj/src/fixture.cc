#include "intrarel/fixture.h"

#include <json.hpp>

#include "intrarel/error.h"
#include "intrarel/random.h"

namespace intrarel {
namespace {

// Level-2 frequencies used to weight sense sampling.
double sense_weight(SenseLabel s) {
  switch (s) {
    case SenseLabel::kContingencyCause: return 1366;
    case SenseLabel::kContingencyPurpose: return 1323;
    case SenseLabel::kExpansionConjunction: return 667;
    case SenseLabel::kExpansionLevelOfDetail: return 565;
    case SenseLabel::kContingencyCondition: return 222;
    case SenseLabel::kExpansionManner: return 183;
    case SenseLabel::kTemporalAsynchronous: return 178;
    case SenseLabel::kTemporalSynchronous: return 175;
    case SenseLabel::kComparisonContrast: return 112;
    case SenseLabel::kExpansionInstantiation: return 86;
    case SenseLabel::kExpansionSubstitution: return 82;
    default: return 50;
  }
}

struct Builder {
  Rng& rng;
  const FixtureParams& p;
  std::size_t n_filler;
  std::size_t n_content;
  AnnotatedSentence s;
  std::vector<std::string> pos;

  void push(std::string tok, std::string tag) {
    s.tokens.push_back(std::move(tok));
    pos.push_back(std::move(tag));
  }
  void filler(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) push("f" + std::to_string(uniform_index(rng, n_filler)), "DT");
  }
  Span content(std::size_t n) {
    std::size_t start = s.tokens.size();
    for (std::size_t i = 0; i < n; ++i) push("w" + std::to_string(uniform_index(rng, n_content)), "NN");
    return {start, s.tokens.size()};
  }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + uniform_index(rng, hi - lo + 1); }

  SenseLabel pick_sense() {
    double total = 0;
    for (auto x : p.senses) total += sense_weight(x);
    double u = uniform01(rng) * total;
    for (auto x : p.senses) {
      u -= sense_weight(x);
      if (u < 0) return x;
    }
    return p.senses.back();
  }

  std::vector<Span> arg1_region(bool discontinuous) {
    if (!discontinuous) return {content(between(2, 4))};
    Span a = content(between(1, 2));
    filler(1);
    Span b = content(between(1, 2));
    return {a, b};
  }

  std::vector<Span> arg2_region(SenseLabel sense) {
    std::size_t start = s.tokens.size();
    push(sense_cue(sense, uniform_index(rng, 2)), "IN");
    content(between(1, 3));
    return {{start, s.tokens.size()}};
  }

  GoldRelation relation_segment() {
    GoldRelation r;
    r.sense = pick_sense();
    r.provenance = bernoulli(rng, p.altlex_rate) ? Provenance::kAltLex : Provenance::kImplicit;
    bool disc = bernoulli(rng, p.discontinuous_rate);
    if (bernoulli(rng, p.arg2_first_rate)) {
      r.arg2_spans = arg2_region(r.sense);
      push(",", ",");
      r.arg1_spans = arg1_region(disc);
    } else {
      r.arg1_spans = arg1_region(disc);
      push(",", ",");
      r.arg2_spans = arg2_region(r.sense);
    }
    return r;
  }

  GoldRelation linked_segment() {
    GoldRelation r;
    r.sense = SenseLabel::kContingencyCause;
    r.linked_to_explicit = true;
    r.arg1_spans = {content(between(2, 3))};
    push("because", "IN");
    r.arg2_spans = {content(between(2, 3))};
    return r;
  }

  std::string right_branching_parse() const {
    std::string out;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out += "(S (" + pos[i] + " " + s.tokens[i] + ")";
      if (i + 1 < s.tokens.size()) out += " ";
    }
    out.append(s.tokens.size(), ')');
    return out;
  }
};

}  // namespace

std::string sense_cue(SenseLabel sense, std::size_t variant) {
  return "c" + std::to_string(sense_index(sense)) + "_" + std::to_string(variant);
}

Fixture generate_fixture(std::uint64_t seed, const FixtureParams& p) {
  if (p.n_sentences == 0 || p.vocab_size < 4 || p.senses.empty()) {
    throw ConfigError("fixture parameters must be positive (n_sentences, vocab_size >= 4, senses)");
  }
  for (double r : {p.relation_rate, p.multi_relation_rate, p.altlex_rate, p.linked_rate,
                   p.discontinuous_rate, p.arg2_first_rate}) {
    if (r < 0.0 || r > 1.0) throw ConfigError("fixture rates must lie in [0, 1]");
  }
  Rng rng(seed);
  Fixture fx;
  FixtureLedger& led = fx.ledger;
  led.n_sentences = p.n_sentences;
  double p_multi_given_rel =
      p.relation_rate > 0 ? std::min(1.0, p.multi_relation_rate / p.relation_rate) : 0.0;

  for (std::size_t i = 0; i < p.n_sentences; ++i) {
    Builder b{rng, p, std::max<std::size_t>(2, p.vocab_size / 2),
              std::max<std::size_t>(2, p.vocab_size - p.vocab_size / 2), {}, {}};
    b.s.doc_id = "fx" + std::to_string(i / 10);
    b.s.sent_index = i % 10;

    std::size_t k = 0;
    if (bernoulli(rng, p.relation_rate)) {
      k = 1;
      if (bernoulli(rng, p_multi_given_rel)) k = bernoulli(rng, 0.2) ? 3 : 2;
    }
    b.filler(b.between(0, 2));
    if (k == 0) {
      b.content(b.between(2, 5));
      b.filler(b.between(1, 3));
      b.content(b.between(0, 3));
    }
    std::size_t eligible = 0;
    for (std::size_t r = 0; r < k; ++r) {
      if (r > 0) b.push(";", ":");
      GoldRelation rel = b.relation_segment();
      led.total_relations++;
      if (rel.provenance == Provenance::kAltLex) led.altlex_relations++;
      if (!rel.arg1_first()) led.arg2_first_relations++;
      if (rel.continuous()) {
        eligible++;
        led.eligible_sense_counts[rel.sense]++;
      } else {
        led.discontinuous_relations++;
      }
      b.s.relations.push_back(std::move(rel));
    }
    if (k > 0 && bernoulli(rng, p.linked_rate)) {
      b.push(";", ":");
      b.s.relations.push_back(b.linked_segment());
      led.total_relations++;
      led.linked_relations++;
    }
    b.filler(b.between(0, 2));
    b.push(".", ".");
    led.eligible_relations += eligible;
    led.sentences_by_eligible_count[eligible]++;
    b.s.parse = b.right_branching_parse();
    fx.corpus.push_back(std::move(b.s));
  }
  return fx;
}

std::string ledger_to_json(const FixtureLedger& led) {
  nlohmann::json by_count = nlohmann::json::object();
  for (const auto& [k, v] : led.sentences_by_eligible_count) by_count[std::to_string(k)] = v;
  nlohmann::json senses = nlohmann::json::object();
  for (const auto& [k, v] : led.eligible_sense_counts) senses[std::string(to_string(k))] = v;
  nlohmann::json j = {{"n_sentences", led.n_sentences},
                      {"total_relations", led.total_relations},
                      {"eligible_relations", led.eligible_relations},
                      {"linked_relations", led.linked_relations},
                      {"altlex_relations", led.altlex_relations},
                      {"discontinuous_relations", led.discontinuous_relations},
                      {"arg2_first_relations", led.arg2_first_relations},
                      {"sentences_by_eligible_count", by_count},
                      {"eligible_sense_counts", senses}};
  return j.dump(2);
}

}  // namespace intrarel
