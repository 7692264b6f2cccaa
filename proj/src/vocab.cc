#include "intrarel/vocab.h"

#include <algorithm>

#include "intrarel/error.h"

namespace intrarel {

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
}

void Vocabulary::add(const std::string& token) {
  if (ids_.count(token)) throw ValidationError("duplicate vocabulary entry '" + token + "'");
  ids_.emplace(token, tokens_.size());
  tokens_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<std::string>& stream, std::size_t cap,
                             const std::vector<std::string>& extra_reserved) {
  Vocabulary v;
  for (const auto& r : extra_reserved) v.add(r);
  v.num_reserved_ = v.tokens_.size();

  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& t : stream) {
    if (!v.contains(t)) freq[t]++;
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > cap) ranked.resize(cap);
  for (const auto& [tok, n] : ranked) v.add(tok);
  return v;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences,
                             std::size_t cap, const std::vector<std::string>& extra_reserved) {
  std::vector<std::string> stream;
  for (const auto& s : sentences) stream.insert(stream.end(), s.begin(), s.end());
  return build(stream, cap, extra_reserved);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens,
                                   std::size_t num_reserved) {
  if (tokens.size() < 2 || tokens[kPad] != kPadToken || tokens[kUnk] != kUnkToken ||
      num_reserved < 2 || num_reserved > tokens.size()) {
    throw FormatError("vocabulary must start with the PAD and UNK entries");
  }
  Vocabulary v;
  for (std::size_t i = 2; i < tokens.size(); ++i) v.add(tokens[i]);
  v.num_reserved_ = num_reserved;
  return v;
}

std::size_t Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

}  // namespace intrarel
