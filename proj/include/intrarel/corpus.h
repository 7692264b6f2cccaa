#ifndef INTRAREL_CORPUS_H_
#define INTRAREL_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intrarel/bio.h"
#include "intrarel/sense_label.h"

namespace intrarel {

enum class Provenance { kImplicit, kAltLex };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

struct GoldRelation {
  std::vector<Span> arg1_spans;
  std::vector<Span> arg2_spans;
  SenseLabel sense = SenseLabel::kContingencyCause;
  Provenance provenance = Provenance::kImplicit;
  bool linked_to_explicit = false;

  // Both arguments are a single contiguous span.
  bool continuous() const { return arg1_spans.size() == 1 && arg2_spans.size() == 1; }
  // Start of the leftmost span of either argument.
  std::size_t leftmost_start() const;
  // True when Arg1 begins before Arg2.
  bool arg1_first() const;

  friend bool operator==(const GoldRelation&, const GoldRelation&) = default;
};

struct AnnotatedSentence {
  std::string doc_id;
  std::size_t sent_index = 0;
  std::vector<std::string> tokens;
  std::string parse;  // empty when absent
  std::vector<GoldRelation> relations;

  bool has_parse() const { return !parse.empty(); }
  // "doc_id#sent_index"
  std::string key() const;

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

using Corpus = std::vector<AnnotatedSentence>;

// Throws ValidationError naming doc_id/sent_index on any invariant violation.
void validate(const AnnotatedSentence& s);

// JSON-lines corpus I/O. load_corpus throws ParseError (with line number) on
// malformed lines and ValidationError on invariant violations.
Corpus load_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);
void write_corpus(std::ostream& out, const Corpus& corpus);

struct D1Options {
  // Relations with a discontinuous argument are dropped. When false, every
  // span of an argument is tagged as its own B/I run.
  bool skip_discontinuous = true;
};

// AltLex relations count as implicits; relations linked to an explicit
// relation never do.
bool is_eligible(const GoldRelation& r, const D1Options& opts = {});
std::vector<std::size_t> eligible_relations(const AnnotatedSentence& s,
                                            const D1Options& opts = {});

TagSequence relation_tags(const GoldRelation& r, std::size_t length);
std::vector<ArgumentSpan> relation_spans(const GoldRelation& r);

struct D1Example {
  AnnotatedSentence sentence;
  TagSequence tags;
  std::optional<std::size_t> source_relation;  // index into sentence.relations

  const GoldRelation* relation() const {
    return source_relation ? &sentence.relations[*source_relation] : nullptr;
  }
  // "doc_id#sent_index#relation" (relation is "-" for all-O examples)
  std::string key() const;
};

// One example per eligible relation (each tagging only that relation) and a
// single all-O example for sentences with none.
std::vector<D1Example> generate_d1(const Corpus& corpus, const D1Options& opts = {});

struct D2Example {
  std::string doc_id;
  std::size_t sent_index = 0;
  std::vector<std::string> arg1_tokens;
  std::vector<std::string> arg2_tokens;
  std::vector<Span> arg1_spans;
  std::vector<Span> arg2_spans;
  std::string parse;
  SenseLabel sense = SenseLabel::kContingencyCause;
  Provenance provenance = Provenance::kImplicit;

  std::string key() const;
};

std::vector<D2Example> generate_d2(const Corpus& corpus, const D1Options& opts = {});
D2Example make_d2(const AnnotatedSentence& s, const GoldRelation& r);

void save_d1(const std::filesystem::path& path, const std::vector<D1Example>& d1);
std::vector<D1Example> load_d1(const std::filesystem::path& path);
void save_d2(const std::filesystem::path& path, const std::vector<D2Example>& d2);
std::vector<D2Example> load_d2(const std::filesystem::path& path);

struct CountShare {
  std::size_t count = 0;
  double percentage = 0.0;
};

struct CorpusStats {
  std::size_t total_sentences = 0;
  std::size_t total_relations = 0;
  std::map<std::size_t, CountShare> sentences_by_relation_count;
  std::map<SenseLabel, CountShare> sense_histogram;
};

CorpusStats corpus_stats(const Corpus& corpus, const D1Options& opts = {});
// Plain-text tables: relations per sentence, then the sense distribution.
std::string format_stats(const CorpusStats& stats);

enum class SplitUnit { kSentence, kDocument };

struct Split {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// Deterministic for a fixed seed. With kSentence the part sizes are the
// largest-remainder rounding of the exact ratios.
Split split_random(const Corpus& corpus, std::array<double, 3> ratios, std::uint64_t seed,
                   SplitUnit unit = SplitUnit::kSentence);

// k folds; fold i tests on block i, uses block (i + 1) mod k as dev and the
// rest for training.
std::vector<Split> kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed);

}  // namespace intrarel

#endif  // INTRAREL_CORPUS_H_
