#ifndef INTRAREL_PIPELINE_H_
#define INTRAREL_PIPELINE_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intrarel/eval.h"
#include "intrarel/sense.h"
#include "intrarel/tagger.h"

namespace intrarel {

enum class DisambiguationNote { kUnique, kChosenByLikelihood, kSkippedEqualSenses, kBaselineMostFrequent };

std::string_view to_string(DisambiguationNote n);

enum class Strategy { kLikelihood, kMostFrequentBaseline };

struct CandidatePair {
  ArgumentSpan arg1;
  ArgumentSpan arg2;
};

struct ParsedRelation {
  ArgumentSpan arg1;
  ArgumentSpan arg2;
  SenseLabel sense = kMostFrequentSense;
  double probability = 0.0;
  DisambiguationNote note = DisambiguationNote::kUnique;
};

inline constexpr std::size_t kMaxCandidatePairs = 16;

// Cross product of Arg1 and Arg2 spans ordered by leftmost start, then by
// total length, then by the later span's start; truncated to `cap`.
std::vector<CandidatePair> candidate_pairs(const std::vector<ArgumentSpan>& spans,
                                           std::size_t cap = kMaxCandidatePairs);

using PairScorer = std::function<SenseDistribution(const CandidatePair&)>;

// Picks one of >= 2 candidates (ValidationError otherwise).
// Likelihood: the first pair when every argmax sense agrees (skipped), else the
// pair with the highest maximum probability, earliest on ties.
// Baseline: the first pair predicted as the most frequent sense, else the first.
ParsedRelation disambiguate(const std::vector<CandidatePair>& candidates, const PairScorer& score,
                            Strategy strategy = Strategy::kLikelihood);

struct ScoredCandidate {
  CandidatePair pair;
  SenseDistribution distribution;
};

struct SentenceParse {
  std::string key;
  TagSequence tags;
  std::vector<ScoredCandidate> candidates;
  std::optional<ParsedRelation> relation;

  nlohmann::json to_json() const;
};

// Throws ConfigError when the models disagree on parse features.
void check_compatible(const TaggerModel& tagger, const SenseModel& sense);

SentenceParse parse_sentence(const TaggerModel& tagger, const SenseModel& sense,
                             const AnnotatedSentence& sentence,
                             Strategy strategy = Strategy::kLikelihood);

// Same as parse_sentence but from an existing tag sequence.
SentenceParse parse_tagged(const SenseModel& sense, const AnnotatedSentence& sentence,
                           const TagSequence& tags, Strategy strategy = Strategy::kLikelihood);

// Gold spans of a D1 example, extracted from its tags.
KeyedSpans gold_spans(const D1Example& ex);

std::vector<TagSequence> predict_tags(const TaggerModel& model, const std::vector<D1Example>& examples);

struct TaggerReportOptions {
  bool slices = false;
  std::size_t sense_threshold = 100;
};

// Exact match, token labels, argument order and optional condition slices.
EvalReport tagger_report(const std::vector<D1Example>& examples, const std::vector<TagSequence>& predicted,
                         const TaggerReportOptions& opts = {});

std::vector<SenseLabel> predict_senses(const SenseModel& model, const std::vector<D2Example>& examples);
EvalReport sense_eval_report(const std::vector<D2Example>& examples, const std::vector<SenseLabel>& predicted);

struct PipelineEvaluation {
  EvalReport gold_arguments;
  EvalReport predicted_arguments;
  std::vector<std::string> kept_keys;
  std::vector<std::string> dropped_keys;
};

// Sense classification on gold spans versus pipeline spans, both over the
// relations whose sentence yields a predicted pair.
PipelineEvaluation evaluate_pipeline(const TaggerModel& tagger, const SenseModel& sense,
                                     const std::vector<D1Example>& test,
                                     Strategy strategy = Strategy::kLikelihood);

}  // namespace intrarel

#endif  // INTRAREL_PIPELINE_H_
