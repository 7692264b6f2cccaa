#include "intrarel/contextual.h"

#include <fstream>

#include <json.hpp>

#include "intrarel/error.h"

namespace intrarel {

using nlohmann::json;

void ContextualVectors::insert(const std::string& doc_id, std::size_t sent_index,
                               Eigen::MatrixXd vectors) {
  const auto d = static_cast<std::size_t>(vectors.rows());
  if (d == 0) throw FormatError("contextual vectors for " + doc_id + "/" +
                                std::to_string(sent_index) + " are empty");
  if (dim_ == 0) dim_ = d;
  if (d != dim_) {
    throw FormatError("contextual vector width " + std::to_string(d) + " for " + doc_id + "/" +
                      std::to_string(sent_index) + " differs from " + std::to_string(dim_));
  }
  entries_[{doc_id, sent_index}] = std::move(vectors);
}

ContextualVectors ContextualVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open contextual vector file " + path.string());
  ContextualVectors out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      auto rows = j.at("vectors").get<std::vector<std::vector<double>>>();
      if (rows.empty()) throw FormatError("no vectors");
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.front().size()),
                        static_cast<Eigen::Index>(rows.size()));
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t].size() != rows.front().size()) throw FormatError("ragged vector array");
        for (std::size_t k = 0; k < rows[t].size(); ++k) {
          m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = rows[t][k];
        }
      }
      out.insert(j.at("doc_id").get<std::string>(), j.at("sent_index").get<std::size_t>(),
                 std::move(m));
    } catch (const json::exception& e) {
      throw ParseError(std::string("contextual vectors: ") + e.what(), lineno);
    } catch (const FormatError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

ContextualVectors ContextualVectors::load(const std::filesystem::path& path,
                                          const Corpus& corpus) {
  ContextualVectors out = load(path);
  for (const auto& s : corpus) {
    if (out.contains(s.doc_id, s.sent_index)) out.lookup(s);
  }
  return out;
}

void ContextualVectors::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& [key, m] : entries_) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index t = 0; t < m.cols(); ++t) {
      rows[static_cast<std::size_t>(t)].assign(m.col(t).data(), m.col(t).data() + m.rows());
    }
    json j = {{"doc_id", key.first}, {"sent_index", key.second}, {"vectors", rows}};
    out << j.dump() << '\n';
  }
}

bool ContextualVectors::contains(const std::string& doc_id, std::size_t sent_index) const {
  return entries_.count({doc_id, sent_index}) > 0;
}

const Eigen::MatrixXd& ContextualVectors::lookup(const std::string& doc_id,
                                                 std::size_t sent_index) const {
  auto it = entries_.find({doc_id, sent_index});
  if (it == entries_.end()) {
    throw LookupError("no contextual vectors for sentence " + doc_id + "/" +
                      std::to_string(sent_index));
  }
  return it->second;
}

const Eigen::MatrixXd& ContextualVectors::lookup(const AnnotatedSentence& s) const {
  const auto& m = lookup(s.doc_id, s.sent_index);
  if (static_cast<std::size_t>(m.cols()) != s.tokens.size()) {
    throw ValidationError("sentence " + s.doc_id + "/" + std::to_string(s.sent_index) + " has " +
                          std::to_string(s.tokens.size()) + " tokens but " +
                          std::to_string(m.cols()) + " contextual vectors");
  }
  return m;
}

}  // namespace intrarel
