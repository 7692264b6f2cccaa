#ifndef INTRAREL_FIXTURE_H_
#define INTRAREL_FIXTURE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "intrarel/corpus.h"

namespace intrarel {

// Synthetic corpus with planted, learnable structure:
//
//   [filler] ARG1 , CUE ARG2 [; ARG1 , CUE ARG2]* [; X because X] [filler] .
//
// Arg2 always opens with a sense cue token ("c<sense>_<variant>"), so the
// sense is a deterministic function of that token; a comma (labelled O)
// separates the arguments. Arg2-first relations swap the two regions.
// "because" segments are relations linked to an explicit connective.
struct FixtureParams {
  std::size_t n_sentences = 200;
  std::size_t vocab_size = 60;
  double relation_rate = 0.6;         // P(sentence has >= 1 relation)
  double multi_relation_rate = 0.05;  // P(sentence has >= 2 relations)
  double altlex_rate = 0.1;
  double linked_rate = 0.05;          // P(extra linked relation | has relations)
  double discontinuous_rate = 0.0;
  double arg2_first_rate = 0.1;
  std::vector<SenseLabel> senses = {
      SenseLabel::kContingencyCause,      SenseLabel::kContingencyPurpose,
      SenseLabel::kExpansionConjunction,  SenseLabel::kExpansionLevelOfDetail,
      SenseLabel::kContingencyCondition,  SenseLabel::kExpansionManner,
  };
};

// Exact counts of what was planted, for test oracles.
struct FixtureLedger {
  std::size_t n_sentences = 0;
  std::size_t total_relations = 0;
  std::size_t eligible_relations = 0;  // continuous and not linked
  std::size_t linked_relations = 0;
  std::size_t altlex_relations = 0;
  std::size_t discontinuous_relations = 0;
  std::size_t arg2_first_relations = 0;
  std::map<std::size_t, std::size_t> sentences_by_eligible_count;
  std::map<SenseLabel, std::size_t> eligible_sense_counts;
};

struct Fixture {
  Corpus corpus;
  FixtureLedger ledger;
};

Fixture generate_fixture(std::uint64_t seed, const FixtureParams& params = {});

// Cue token planted at the start of Arg2 for the given sense.
std::string sense_cue(SenseLabel sense, std::size_t variant);

std::string ledger_to_json(const FixtureLedger& ledger);

}  // namespace intrarel

#endif  // INTRAREL_FIXTURE_H_
