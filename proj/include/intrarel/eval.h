#ifndef INTRAREL_EVAL_H_
#define INTRAREL_EVAL_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intrarel/bio.h"
#include "intrarel/sense_label.h"

namespace intrarel {

// Scores are percentages. Precision is 0 when nothing was predicted.
struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // gold count
  std::size_t predicted = 0;
  std::size_t true_positives = 0;

  static PRF from_counts(std::size_t tp, std::size_t predicted, std::size_t gold);
};

// Argument spans of one evaluation unit, keyed for alignment.
struct KeyedSpans {
  std::string key;
  std::vector<ArgumentSpan> spans;
};

struct RolePRF {
  PRF arg1;
  PRF arg2;
};

// A predicted span is a hit iff an unmatched gold span of the same role has
// the identical interval; each gold span matches at most once. Throws
// ValidationError unless both sides carry the same keys.
RolePRF exact_match(const std::vector<KeyedSpans>& gold, const std::vector<KeyedSpans>& pred);

// Per-label counts over every token, O included. Indexed by label_index.
std::array<PRF, kNumLabels> token_prf(const std::vector<TagSequence>& gold,
                                      const std::vector<TagSequence>& pred);
double token_accuracy(const std::vector<TagSequence>& gold, const std::vector<TagSequence>& pred);

enum class ArgOrder { kArg1Arg2, kArg2Arg1 };

// Order of the first Arg1 and first Arg2 span; nullopt unless both exist.
std::optional<ArgOrder> argument_order(const std::vector<ArgumentSpan>& spans);

struct OrderReport {
  PRF arg1_arg2;
  PRF arg2_arg1;
};

// Units whose gold side lacks either role are ignored. A prediction without
// both roles classifies nothing and so only costs recall.
OrderReport order_score(const std::vector<KeyedSpans>& gold, const std::vector<KeyedSpans>& pred);

struct SenseReport {
  std::array<PRF, kNumSenses> per_sense;
  PRF micro;
  PRF weighted;  // per-sense scores averaged with gold-support weights
  double accuracy = 0.0;
  std::size_t n = 0;
  // confusion[gold][pred]
  std::array<std::array<std::size_t, kNumSenses>, kNumSenses> confusion{};
};

SenseReport sense_report(const std::vector<SenseLabel>& gold, const std::vector<SenseLabel>& pred);

// Everything needed to place one gold relation into condition slices.
struct SliceItem {
  KeyedSpans gold;
  KeyedSpans pred;
  std::size_t relations_in_sentence = 0;  // eligible relations of the source sentence
  std::size_t position = 0;               // rank among them by leftmost start
  std::optional<SenseLabel> sense;        // nullopt for relation-free units
};

struct SliceReport {
  std::string name;
  std::size_t size = 0;
  RolePRF exact;
};

// Slices: "multi-relation", "multi-relation-left", "multi-relation-right"
// (left when 2 * position < relations_in_sentence), and one "sense:<label>"
// slice per sense with strictly more than `sense_threshold` items.
std::vector<SliceReport> slice_eval(const std::vector<SliceItem>& items,
                                    std::size_t sense_threshold = 100);

struct EvalReport {
  std::string name;
  std::size_t n_examples = 0;
  std::optional<RolePRF> exact;
  std::optional<std::array<PRF, kNumLabels>> tokens;
  std::optional<double> token_accuracy;
  std::optional<OrderReport> order;
  std::optional<SenseReport> sense;
  std::vector<SliceReport> slices;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  // Every scalar metric keyed by a dotted path, e.g. "exact.arg1.f1".
  std::map<std::string, double> flatten() const;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

struct CrossvalSummary {
  std::size_t folds = 0;
  std::map<std::string, MeanStd> metrics;

  nlohmann::json to_json() const;
};

// Throws ValidationError for fewer than two reports or differing schemas.
CrossvalSummary crossval_aggregate(const std::vector<EvalReport>& reports);

// Aligned plain-text tables.
std::string format_exact_table(const RolePRF& r);
std::string format_token_table(const std::array<PRF, kNumLabels>& t);
std::string format_order_table(const OrderReport& r);
std::string format_sense_table(const SenseReport& r);
std::string format_slice_table(const std::vector<SliceReport>& slices);
std::string format_crossval_table(const CrossvalSummary& s);
std::string format_report(const EvalReport& r);

// Header row of sense names, then one row per gold sense.
std::string confusion_csv(const SenseReport& r);

}  // namespace intrarel

#endif  // INTRAREL_EVAL_H_
