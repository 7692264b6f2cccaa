#include "intrarel/embedding.h"

#include <fstream>
#include <sstream>

#include "intrarel/error.h"

namespace intrarel {

Embedding::Embedding(const std::string& name, std::size_t vocab_size, std::size_t dim, Rng* rng) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab_size),
                                            static_cast<Eigen::Index>(dim));
  if (rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(i, j) = uniform(*rng, -kEmbeddingInitScale, kEmbeddingInitScale);
      }
    }
  }
  table = Param(name, std::move(m));
}

Eigen::MatrixXd Embedding::lookup(const std::vector<std::size_t>& ids) const {
  Eigen::MatrixXd x(table.value.cols(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t t = 0; t < ids.size(); ++t) {
    x.col(static_cast<Eigen::Index>(t)) = table.value.row(static_cast<Eigen::Index>(ids[t])).transpose();
  }
  return x;
}

void Embedding::backward(const std::vector<std::size_t>& ids, const Eigen::MatrixXd& dx) {
  for (std::size_t t = 0; t < ids.size(); ++t) {
    table.grad.row(static_cast<Eigen::Index>(ids[t])) += dx.col(static_cast<Eigen::Index>(t)).transpose();
  }
}

PretrainedLoad load_pretrained_vectors(const std::filesystem::path& path, const Vocabulary& vocab,
                                       std::size_t dim, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vector file " + path.string());
  Rng rng(seed);
  PretrainedLoad out{Embedding("embedding", vocab.size(), dim, &rng), 0};
  std::vector<bool> seen(vocab.size(), false);

  std::string line, token;
  std::size_t lineno = 0, width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (!(ls >> token)) continue;
    std::vector<double> values;
    std::string field;
    while (ls >> field) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) +
                          ": non-numeric vector component '" + field + "'");
      }
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": vector width " +
                        std::to_string(values.size()) + " differs from " + std::to_string(width));
    }
    if (width != dim) {
      throw FormatError(path.string() + ": vector width " + std::to_string(width) +
                        " does not match configured dimension " + std::to_string(dim));
    }
    if (!vocab.contains(token)) continue;
    auto id = vocab.id(token);
    if (seen[id]) continue;
    seen[id] = true;
    out.covered++;
    for (std::size_t j = 0; j < dim; ++j) {
      out.embedding.table.value(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(j)) = values[j];
    }
  }
  return out;
}

}  // namespace intrarel
