#ifndef INTRAREL_EMBEDDING_H_
#define INTRAREL_EMBEDDING_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "intrarel/param.h"
#include "intrarel/random.h"
#include "intrarel/vocab.h"

namespace intrarel {

inline constexpr double kEmbeddingInitScale = 0.05;

// Lookup table of shape (vocab size x dim).
class Embedding {
 public:
  Embedding() = default;
  // Rows ~ uniform(-0.05, 0.05); zeros when rng == nullptr.
  Embedding(const std::string& name, std::size_t vocab_size, std::size_t dim, Rng* rng);

  std::size_t vocab_size() const { return static_cast<std::size_t>(table.value.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(table.value.cols()); }

  // dim x n matrix with one column per id.
  Eigen::MatrixXd lookup(const std::vector<std::size_t>& ids) const;
  // Scatters dL/dx columns into the rows of the table gradient.
  void backward(const std::vector<std::size_t>& ids, const Eigen::MatrixXd& dx);

  Param table;
};

struct PretrainedLoad {
  Embedding embedding;
  std::size_t covered = 0;  // vocabulary rows copied from the file
};

// Reads "token v1 ... vd" lines. Rows for vocabulary tokens found in the file
// are copied; all other rows keep a seeded uniform(-0.05, 0.05) draw.
// Throws FormatError on inconsistent widths or a width other than `dim`.
PretrainedLoad load_pretrained_vectors(const std::filesystem::path& path, const Vocabulary& vocab,
                                       std::size_t dim, std::uint64_t seed);

}  // namespace intrarel

#endif  // INTRAREL_EMBEDDING_H_
