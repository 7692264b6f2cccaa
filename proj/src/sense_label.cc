#include "intrarel/sense_label.h"

#include "intrarel/error.h"

namespace intrarel {
namespace {

constexpr std::array<std::string_view, kNumSenses> kNames = {
    "Comparison.Concession",
    "Comparison.Concession+SpeechAct",
    "Comparison.Contrast",
    "Comparison.Similarity",
    "Contingency.Cause",
    "Contingency.Cause+Belief",
    "Contingency.Cause+SpeechAct",
    "Contingency.Condition",
    "Contingency.Condition+SpeechAct",
    "Contingency.Negative-condition",
    "Contingency.Purpose",
    "Expansion.Conjunction",
    "Expansion.Disjunction",
    "Expansion.Equivalence",
    "Expansion.Instantiation",
    "Expansion.Level-of-detail",
    "Expansion.Manner",
    "Expansion.Substitution",
    "Temporal.Asynchronous",
    "Temporal.Synchronous",
};

}  // namespace

const std::array<SenseLabel, kNumSenses>& all_senses() {
  static const auto senses = [] {
    std::array<SenseLabel, kNumSenses> out{};
    for (std::size_t i = 0; i < kNumSenses; ++i) out[i] = static_cast<SenseLabel>(i);
    return out;
  }();
  return senses;
}

SenseLabel sense_from_index(std::size_t i) {
  if (i >= kNumSenses) throw ValidationError("sense index out of range: " + std::to_string(i));
  return static_cast<SenseLabel>(i);
}

std::string_view to_string(SenseLabel s) { return kNames.at(sense_index(s)); }

SenseLabel parse_sense(std::string_view text) {
  for (std::size_t i = 0; i < kNumSenses; ++i) {
    if (kNames[i] == text) return static_cast<SenseLabel>(i);
  }
  throw ValidationError("unknown sense label '" + std::string(text) + "'");
}

}  // namespace intrarel
