#ifndef INTRAREL_ENCODER_H_
#define INTRAREL_ENCODER_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "intrarel/embedding.h"
#include "intrarel/lstm.h"
#include "intrarel/parse_tree.h"
#include "intrarel/vocab.h"

namespace intrarel {

enum class InputMode { kScratch, kPretrainedVectors, kContextual };

std::string_view to_string(InputMode m);
InputMode parse_input_mode(std::string_view text);

struct EncoderConfig {
  InputMode input_mode = InputMode::kScratch;
  std::size_t vocab_cap = 50000;
  std::size_t emb_dim = 100;
  std::size_t hidden = 256;
  bool parse_features = false;
  LinearizeMode parse_mode = LinearizeMode::kLabelsOnly;
  std::size_t parse_emb_dim = 32;
  std::size_t parse_hidden = 64;
  std::string pretrained_path;  // kPretrainedVectors only

  nlohmann::json to_json() const;
  static EncoderConfig from_json(const nlohmann::json& j);
};

// Separate vocabulary, embedding and BiLSTM over a linearized parse tree.
// The summary vector is [final forward state ; final backward state].
class ParseEncoder {
 public:
  ParseEncoder() = default;
  ParseEncoder(Vocabulary vocab, std::size_t emb_dim, std::size_t hidden, Rng* rng);

  std::size_t output_dim() const { return lstm.output_dim(); }

  struct Cache {
    std::vector<std::size_t> ids;
    BiLstm::Cache lstm;
  };

  // Throws ConfigError for an empty token list.
  Eigen::VectorXd encode(const std::vector<std::string>& linear_tokens, Cache* cache) const;
  void backward(const Cache& cache, const Eigen::VectorXd& dvec);

  ParamList params();

  Vocabulary vocab;
  Embedding embedding;
  BiLstm lstm;
};

// Appends `parse` to every column of `tokens`. Throws ConfigError when the
// widths differ from the configured ones.
Eigen::MatrixXd fuse_features(const Eigen::MatrixXd& tokens, const Eigen::VectorXd& parse,
                              std::size_t token_width, std::size_t parse_width);

// Input layer (embedding table or caller-supplied vectors), BiLSTM, and the
// optional parse-tree encoder broadcast onto every position.
class TokenEncoder {
 public:
  TokenEncoder() = default;
  TokenEncoder(const EncoderConfig& cfg, Vocabulary vocab, std::optional<Vocabulary> parse_vocab,
               std::size_t input_dim, Rng* rng);

  const EncoderConfig& config() const { return cfg_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t token_dim() const { return lstm.output_dim(); }
  std::size_t parse_dim() const { return parse ? parse->output_dim() : 0; }
  std::size_t output_dim() const { return token_dim() + parse_dim(); }
  bool uses_embedding() const { return cfg_.input_mode != InputMode::kContextual; }

  struct Cache {
    BiLstm::Cache lstm;
    ParseEncoder::Cache parse;
  };

  Eigen::MatrixXd embed(const std::vector<std::string>& tokens, std::vector<std::size_t>* ids) const;
  Eigen::MatrixXd embed_ids(const std::vector<std::size_t>& ids) const;

  // x is input_dim x n. `parse_tree` is the bracketed tree; required when
  // parse features are enabled (ConfigError otherwise). Returns output_dim x n.
  Eigen::MatrixXd encode(const Eigen::MatrixXd& x, const std::string& parse_tree,
                         Cache* cache) const;
  // Returns dL/dx.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dout);
  void backward_embedding(const std::vector<std::size_t>& ids, const Eigen::MatrixXd& dx);

  ParamList params();

  nlohmann::json meta_to_json() const;
  static TokenEncoder from_meta_json(const nlohmann::json& j);

  Vocabulary vocab;
  std::optional<Embedding> embedding;
  BiLstm lstm;
  std::optional<ParseEncoder> parse;

 private:
  EncoderConfig cfg_;
  std::size_t input_dim_ = 0;
};

// Parse-encoder vocabulary built from the linearized trees of `parses`.
Vocabulary build_parse_vocab(const std::vector<std::string>& parses, LinearizeMode mode);

}  // namespace intrarel

#endif  // INTRAREL_ENCODER_H_
