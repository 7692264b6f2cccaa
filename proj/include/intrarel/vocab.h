#ifndef INTRAREL_VOCAB_H_
#define INTRAREL_VOCAB_H_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace intrarel {

// Dense token <-> id map. Ids 0 and 1 are always PAD and UNK; callers may
// reserve further marker tokens directly after them.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();

  // Keeps the `cap` most frequent tokens of `stream` (ties broken
  // lexicographically) after the reserved entries.
  static Vocabulary build(const std::vector<std::string>& stream, std::size_t cap,
                          const std::vector<std::string>& extra_reserved = {});
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences,
                          std::size_t cap, const std::vector<std::string>& extra_reserved = {});

  // Restores a vocabulary from its id-ordered token list.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens,
                                std::size_t num_reserved);

  std::size_t size() const { return tokens_.size(); }
  std::size_t num_reserved() const { return num_reserved_; }
  bool contains(const std::string& token) const { return ids_.count(token) > 0; }
  // UNK for out-of-vocabulary tokens.
  std::size_t id(const std::string& token) const;
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::vector<std::size_t> encode(const std::vector<std::string>& tokens) const;

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t num_reserved_ = 2;
};

}  // namespace intrarel

#endif  // INTRAREL_VOCAB_H_
