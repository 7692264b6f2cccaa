#include "intrarel/pipeline.h"

#include <algorithm>
#include <map>
#include <tuple>

#include "intrarel/error.h"

namespace intrarel {

using nlohmann::json;

std::string_view to_string(DisambiguationNote n) {
  switch (n) {
    case DisambiguationNote::kUnique: return "unique";
    case DisambiguationNote::kChosenByLikelihood: return "chosen_by_likelihood";
    case DisambiguationNote::kSkippedEqualSenses: return "skipped_equal_senses";
    case DisambiguationNote::kBaselineMostFrequent: return "baseline_most_frequent";
  }
  return "unique";
}

std::vector<CandidatePair> candidate_pairs(const std::vector<ArgumentSpan>& spans, std::size_t cap) {
  std::vector<CandidatePair> out;
  for (const auto& a : spans) {
    if (a.role != Role::kArg1) continue;
    for (const auto& b : spans) {
      if (b.role == Role::kArg2) out.push_back({a, b});
    }
  }
  auto key = [](const CandidatePair& p) {
    const auto s1 = p.arg1.span.start, s2 = p.arg2.span.start;
    return std::make_tuple(std::min(s1, s2), p.arg1.span.length() + p.arg2.span.length(),
                           std::max(s1, s2), s1);
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const CandidatePair& x, const CandidatePair& y) { return key(x) < key(y); });
  if (out.size() > cap) out.resize(cap);
  return out;
}

namespace {

ParsedRelation make_relation(const CandidatePair& p, const SenseDistribution& d, DisambiguationNote note) {
  return {p.arg1, p.arg2, d.argmax(), d.max_probability(), note};
}

ParsedRelation choose(const std::vector<ScoredCandidate>& scored, Strategy strategy) {
  if (strategy == Strategy::kMostFrequentBaseline) {
    for (const auto& c : scored) {
      if (c.distribution.argmax() == kMostFrequentSense) {
        return make_relation(c.pair, c.distribution, DisambiguationNote::kBaselineMostFrequent);
      }
    }
    return make_relation(scored.front().pair, scored.front().distribution,
                         DisambiguationNote::kBaselineMostFrequent);
  }
  const SenseLabel first = scored.front().distribution.argmax();
  const bool all_equal = std::all_of(scored.begin(), scored.end(), [&](const ScoredCandidate& c) {
    return c.distribution.argmax() == first;
  });
  if (all_equal) {
    return make_relation(scored.front().pair, scored.front().distribution,
                         DisambiguationNote::kSkippedEqualSenses);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.size(); ++i) {
    if (scored[i].distribution.max_probability() > scored[best].distribution.max_probability()) best = i;
  }
  return make_relation(scored[best].pair, scored[best].distribution, DisambiguationNote::kChosenByLikelihood);
}

json span_json(const ArgumentSpan& a) {
  return {{"role", std::string(to_string(a.role))}, {"start", a.span.start}, {"end", a.span.end}};
}

}  // namespace

ParsedRelation disambiguate(const std::vector<CandidatePair>& candidates, const PairScorer& score,
                            Strategy strategy) {
  if (candidates.size() < 2) throw ValidationError("disambiguation needs at least two candidate pairs");
  std::vector<ScoredCandidate> scored;
  for (const auto& c : candidates) scored.push_back({c, score(c)});
  return choose(scored, strategy);
}

json SentenceParse::to_json() const {
  json cands = json::array();
  for (const auto& c : candidates) {
    cands.push_back({{"arg1", span_json(c.pair.arg1)},
                     {"arg2", span_json(c.pair.arg2)},
                     {"sense", std::string(intrarel::to_string(c.distribution.argmax()))},
                     {"probability", c.distribution.max_probability()}});
  }
  json j = {{"key", key}, {"tags", tags_to_strings(tags)}, {"candidates", cands}, {"relation", nullptr}};
  if (relation) {
    j["relation"] = {{"arg1", span_json(relation->arg1)},
                     {"arg2", span_json(relation->arg2)},
                     {"sense", std::string(intrarel::to_string(relation->sense))},
                     {"probability", relation->probability},
                     {"note", std::string(intrarel::to_string(relation->note))}};
  }
  return j;
}

void check_compatible(const TaggerModel& tagger, const SenseModel& sense) {
  if (tagger.uses_parse() != sense.uses_parse()) {
    throw ConfigError(std::string("tagger ") + (tagger.uses_parse() ? "uses" : "does not use") +
                      " parse features but the sense model " + (sense.uses_parse() ? "does" : "does not"));
  }
}

SentenceParse parse_tagged(const SenseModel& sense, const AnnotatedSentence& sentence,
                           const TagSequence& tags, Strategy strategy) {
  SentenceParse out;
  out.key = sentence.key();
  out.tags = tags;
  auto pairs = candidate_pairs(extract_spans(tags));
  if (pairs.empty()) return out;
  for (const auto& p : pairs) {
    auto in = make_pair_input(sentence, {p.arg1.span}, {p.arg2.span}, sense.context());
    out.candidates.push_back({p, sense.classify(in)});
  }
  if (out.candidates.size() == 1) {
    out.relation = make_relation(out.candidates[0].pair, out.candidates[0].distribution,
                                 DisambiguationNote::kUnique);
  } else {
    out.relation = choose(out.candidates, strategy);
  }
  return out;
}

SentenceParse parse_sentence(const TaggerModel& tagger, const SenseModel& sense,
                             const AnnotatedSentence& sentence, Strategy strategy) {
  check_compatible(tagger, sense);
  return parse_tagged(sense, sentence, tagger.tag(sentence), strategy);
}

KeyedSpans gold_spans(const D1Example& ex) { return {ex.key(), extract_spans(ex.tags)}; }

std::vector<TagSequence> predict_tags(const TaggerModel& model, const std::vector<D1Example>& examples) {
  std::map<std::string, TagSequence> cache;
  std::vector<TagSequence> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    auto key = ex.sentence.key();
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, model.tag(ex.sentence)).first;
    out.push_back(it->second);
  }
  return out;
}

EvalReport tagger_report(const std::vector<D1Example>& examples, const std::vector<TagSequence>& predicted,
                         const TaggerReportOptions& opts) {
  if (examples.size() != predicted.size()) throw ValidationError("one prediction per example is required");
  EvalReport r;
  r.name = "argument identification";
  r.n_examples = examples.size();
  std::vector<KeyedSpans> gold, pred;
  std::vector<TagSequence> gold_tags;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    gold.push_back(gold_spans(examples[i]));
    pred.push_back({examples[i].key(), extract_spans(predicted[i])});
    gold_tags.push_back(examples[i].tags);
  }
  r.exact = exact_match(gold, pred);
  r.tokens = token_prf(gold_tags, predicted);
  r.token_accuracy = token_accuracy(gold_tags, predicted);
  r.order = order_score(gold, pred);
  if (opts.slices) {
    std::vector<SliceItem> items;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const auto& ex = examples[i];
      SliceItem it{gold[i], pred[i], 0, 0, std::nullopt};
      if (const auto* rel = ex.relation()) {
        auto eligible = eligible_relations(ex.sentence);
        it.relations_in_sentence = eligible.size();
        it.sense = rel->sense;
        for (auto j : eligible) {
          const auto& other = ex.sentence.relations[j];
          if (other.leftmost_start() < rel->leftmost_start() ||
              (other.leftmost_start() == rel->leftmost_start() && j < *ex.source_relation)) {
            ++it.position;
          }
        }
      }
      items.push_back(std::move(it));
    }
    r.slices = slice_eval(items, opts.sense_threshold);
  }
  return r;
}

std::vector<SenseLabel> predict_senses(const SenseModel& model, const std::vector<D2Example>& examples) {
  std::vector<SenseLabel> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(model.classify(ex).argmax());
  return out;
}

EvalReport sense_eval_report(const std::vector<D2Example>& examples, const std::vector<SenseLabel>& predicted) {
  std::vector<SenseLabel> gold;
  for (const auto& ex : examples) gold.push_back(ex.sense);
  EvalReport r;
  r.name = "sense classification";
  r.n_examples = examples.size();
  r.sense = sense_report(gold, predicted);
  return r;
}

PipelineEvaluation evaluate_pipeline(const TaggerModel& tagger, const SenseModel& sense,
                                     const std::vector<D1Example>& test, Strategy strategy) {
  check_compatible(tagger, sense);
  PipelineEvaluation out;
  std::map<std::string, SentenceParse> parses;
  std::vector<SenseLabel> gold, on_gold, on_pred;
  for (const auto& ex : test) {
    const auto* rel = ex.relation();
    if (!rel) continue;
    auto key = ex.sentence.key();
    auto it = parses.find(key);
    if (it == parses.end()) it = parses.emplace(key, parse_sentence(tagger, sense, ex.sentence, strategy)).first;
    if (!it->second.relation) {
      out.dropped_keys.push_back(ex.key());
      continue;
    }
    out.kept_keys.push_back(ex.key());
    gold.push_back(rel->sense);
    auto in = make_pair_input(ex.sentence, rel->arg1_spans, rel->arg2_spans, sense.context());
    on_gold.push_back(sense.classify(in).argmax());
    on_pred.push_back(it->second.relation->sense);
  }
  out.gold_arguments.name = "senses on gold arguments";
  out.gold_arguments.n_examples = gold.size();
  out.gold_arguments.sense = sense_report(gold, on_gold);
  out.predicted_arguments.name = "senses on predicted arguments";
  out.predicted_arguments.n_examples = gold.size();
  out.predicted_arguments.sense = sense_report(gold, on_pred);
  return out;
}

}  // namespace intrarel
