#include "intrarel/bio.h"

#include "intrarel/error.h"

namespace intrarel {
namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "O", "B-Arg1", "I-Arg1", "B-Arg2", "I-Arg2"};

bool is_inside(BioLabel l) { return l == BioLabel::kIArg1 || l == BioLabel::kIArg2; }

Role role_of(BioLabel l) {
  return (l == BioLabel::kBArg1 || l == BioLabel::kIArg1) ? Role::kArg1 : Role::kArg2;
}

BioLabel begin_of(Role r) { return r == Role::kArg1 ? BioLabel::kBArg1 : BioLabel::kBArg2; }
BioLabel inside_of(Role r) { return r == Role::kArg1 ? BioLabel::kIArg1 : BioLabel::kIArg2; }

}  // namespace

BioLabel label_from_index(std::size_t i) {
  if (i >= kNumLabels) throw ValidationError("label index out of range: " + std::to_string(i));
  return static_cast<BioLabel>(i);
}

std::string_view to_string(BioLabel l) { return kLabelNames.at(label_index(l)); }

BioLabel parse_label(std::string_view text) {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabelNames[i] == text) return static_cast<BioLabel>(i);
  }
  throw ValidationError("unknown BIO label '" + std::string(text) + "'");
}

std::string_view to_string(Role r) { return r == Role::kArg1 ? "Arg1" : "Arg2"; }

bool is_bio_valid(const TagSequence& tags) {
  for (std::size_t j = 0; j < tags.size(); ++j) {
    if (!is_inside(tags[j])) continue;
    if (j == 0) return false;
    BioLabel prev = tags[j - 1];
    if (prev == BioLabel::kO || role_of(prev) != role_of(tags[j])) return false;
  }
  return true;
}

std::vector<ArgumentSpan> extract_spans(const TagSequence& tags) {
  if (!is_bio_valid(tags)) throw ValidationError("tag sequence is not BIO-valid");
  std::vector<ArgumentSpan> spans;
  for (std::size_t j = 0; j < tags.size(); ++j) {
    BioLabel l = tags[j];
    if (l != BioLabel::kBArg1 && l != BioLabel::kBArg2) continue;
    Role role = role_of(l);
    std::size_t end = j + 1;
    while (end < tags.size() && tags[end] == inside_of(role)) ++end;
    spans.push_back({role, {j, end}});
  }
  return spans;
}

TagSequence spans_to_tags(const std::vector<ArgumentSpan>& spans, std::size_t length) {
  TagSequence tags(length, BioLabel::kO);
  std::vector<bool> used(length, false);
  for (const auto& s : spans) {
    if (s.span.start >= s.span.end || s.span.end > length) {
      throw ValidationError("span [" + std::to_string(s.span.start) + ", " +
                            std::to_string(s.span.end) + ") out of range for length " +
                            std::to_string(length));
    }
    for (std::size_t j = s.span.start; j < s.span.end; ++j) {
      if (used[j]) throw ValidationError("overlapping spans at token " + std::to_string(j));
      used[j] = true;
      tags[j] = j == s.span.start ? begin_of(s.role) : inside_of(s.role);
    }
  }
  return tags;
}

std::vector<std::string> tags_to_strings(const TagSequence& tags) {
  std::vector<std::string> out;
  out.reserve(tags.size());
  for (auto l : tags) out.emplace_back(to_string(l));
  return out;
}

TagSequence tags_from_strings(const std::vector<std::string>& labels) {
  TagSequence out;
  out.reserve(labels.size());
  for (const auto& s : labels) out.push_back(parse_label(s));
  return out;
}

}  // namespace intrarel
