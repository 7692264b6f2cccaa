#ifndef INTRAREL_BIO_H_
#define INTRAREL_BIO_H_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace intrarel {

// Label indices are fixed: O is 0 so that lowest-index tie-breaking in
// decoding prefers O.
enum class BioLabel : int { kO = 0, kBArg1 = 1, kIArg1 = 2, kBArg2 = 3, kIArg2 = 4 };

inline constexpr std::size_t kNumLabels = 5;

inline std::size_t label_index(BioLabel l) { return static_cast<std::size_t>(l); }
BioLabel label_from_index(std::size_t i);

std::string_view to_string(BioLabel l);
BioLabel parse_label(std::string_view text);

enum class Role : int { kArg1 = 0, kArg2 = 1 };

std::string_view to_string(Role r);

// Half-open token interval [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct ArgumentSpan {
  Role role = Role::kArg1;
  Span span;

  friend bool operator==(const ArgumentSpan&, const ArgumentSpan&) = default;
};

using TagSequence = std::vector<BioLabel>;

// I-X at position j requires B-X or I-X at j-1; I-X may not start a sequence.
bool is_bio_valid(const TagSequence& tags);

// Each maximal run B-X (I-X)* becomes one span, left to right.
// Throws ValidationError if the sequence is not BIO-valid.
std::vector<ArgumentSpan> extract_spans(const TagSequence& tags);

// Inverse of extract_spans for non-overlapping spans. Throws ValidationError
// on overlap or out-of-range spans.
TagSequence spans_to_tags(const std::vector<ArgumentSpan>& spans, std::size_t length);

std::vector<std::string> tags_to_strings(const TagSequence& tags);
TagSequence tags_from_strings(const std::vector<std::string>& labels);

}  // namespace intrarel

#endif  // INTRAREL_BIO_H_
