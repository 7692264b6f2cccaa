#ifndef INTRAREL_SENSE_LABEL_H_
#define INTRAREL_SENSE_LABEL_H_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace intrarel {

// Level-2 PDTB-3 senses observed on intra-sentential implicit relations.
enum class SenseLabel : int {
  kComparisonConcession = 0,
  kComparisonConcessionSpeechAct,
  kComparisonContrast,
  kComparisonSimilarity,
  kContingencyCause,
  kContingencyCauseBelief,
  kContingencyCauseSpeechAct,
  kContingencyCondition,
  kContingencyConditionSpeechAct,
  kContingencyNegativeCondition,
  kContingencyPurpose,
  kExpansionConjunction,
  kExpansionDisjunction,
  kExpansionEquivalence,
  kExpansionInstantiation,
  kExpansionLevelOfDetail,
  kExpansionManner,
  kExpansionSubstitution,
  kTemporalAsynchronous,
  kTemporalSynchronous,
};

inline constexpr std::size_t kNumSenses = 20;

// The label used by the most-frequent-sense baseline.
inline constexpr SenseLabel kMostFrequentSense = SenseLabel::kContingencyCause;

const std::array<SenseLabel, kNumSenses>& all_senses();

inline std::size_t sense_index(SenseLabel s) { return static_cast<std::size_t>(s); }
SenseLabel sense_from_index(std::size_t i);

// Canonical corpus spelling, e.g. "Contingency.Cause+Belief".
std::string_view to_string(SenseLabel s);

// Throws ValidationError for anything that is not a canonical spelling.
SenseLabel parse_sense(std::string_view text);

}  // namespace intrarel

#endif  // INTRAREL_SENSE_LABEL_H_
