#ifndef INTRAREL_CONTEXTUAL_H_
#define INTRAREL_CONTEXTUAL_H_

#include <filesystem>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "intrarel/corpus.h"

namespace intrarel {

// Fixed per-token vectors produced by an external contextual encoder,
// keyed by (doc_id, sent_index). Each entry is stored as dim x n.
class ContextualVectors {
 public:
  // JSON-lines: {"doc_id": ..., "sent_index": ..., "vectors": [[...], ...]}.
  // Entries for sentences of `corpus` must have one vector per token
  // (ValidationError otherwise); widths must agree (FormatError).
  static ContextualVectors load(const std::filesystem::path& path, const Corpus& corpus);
  static ContextualVectors load(const std::filesystem::path& path);

  void save(const std::filesystem::path& path) const;

  // Throws FormatError when the vector width disagrees with earlier entries.
  void insert(const std::string& doc_id, std::size_t sent_index, Eigen::MatrixXd vectors);

  // Throws LookupError when the sentence is absent and ValidationError when
  // the vector count differs from the token count.
  const Eigen::MatrixXd& lookup(const AnnotatedSentence& s) const;
  const Eigen::MatrixXd& lookup(const std::string& doc_id, std::size_t sent_index) const;

  bool contains(const std::string& doc_id, std::size_t sent_index) const;
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::size_t dim_ = 0;
  std::map<std::pair<std::string, std::size_t>, Eigen::MatrixXd> entries_;
};

}  // namespace intrarel

#endif  // INTRAREL_CONTEXTUAL_H_
