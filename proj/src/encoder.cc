#include "intrarel/encoder.h"

#include "intrarel/error.h"

namespace intrarel {

using nlohmann::json;

std::string_view to_string(InputMode m) {
  switch (m) {
    case InputMode::kScratch: return "scratch";
    case InputMode::kPretrainedVectors: return "pretrained-vectors";
    case InputMode::kContextual: return "contextual-file";
  }
  return "scratch";
}

InputMode parse_input_mode(std::string_view text) {
  if (text == "scratch") return InputMode::kScratch;
  if (text == "pretrained-vectors") return InputMode::kPretrainedVectors;
  if (text == "contextual-file") return InputMode::kContextual;
  throw ConfigError("unknown encoder mode '" + std::string(text) + "'");
}

json EncoderConfig::to_json() const {
  return {{"input_mode", std::string(intrarel::to_string(input_mode))},
          {"vocab_cap", vocab_cap},
          {"emb_dim", emb_dim},
          {"hidden", hidden},
          {"parse_features", parse_features},
          {"parse_mode", parse_mode == LinearizeMode::kLabelsOnly ? "labels_only"
                                                                  : "labels_and_terminals"},
          {"parse_emb_dim", parse_emb_dim},
          {"parse_hidden", parse_hidden},
          {"pretrained_path", pretrained_path}};
}

EncoderConfig EncoderConfig::from_json(const json& j) {
  EncoderConfig c;
  c.input_mode = parse_input_mode(j.at("input_mode").get<std::string>());
  c.vocab_cap = j.at("vocab_cap").get<std::size_t>();
  c.emb_dim = j.at("emb_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.parse_features = j.at("parse_features").get<bool>();
  c.parse_mode = j.at("parse_mode").get<std::string>() == "labels_only"
                     ? LinearizeMode::kLabelsOnly
                     : LinearizeMode::kLabelsAndTerminals;
  c.parse_emb_dim = j.at("parse_emb_dim").get<std::size_t>();
  c.parse_hidden = j.at("parse_hidden").get<std::size_t>();
  c.pretrained_path = j.value("pretrained_path", std::string());
  return c;
}

ParseEncoder::ParseEncoder(Vocabulary v, std::size_t emb_dim, std::size_t hidden, Rng* rng)
    : vocab(std::move(v)),
      embedding("parse.embedding", vocab.size(), emb_dim, rng),
      lstm("parse.lstm", emb_dim, hidden, rng) {}

Eigen::VectorXd ParseEncoder::encode(const std::vector<std::string>& linear_tokens,
                                     Cache* cache) const {
  if (linear_tokens.empty()) throw ConfigError("parse features enabled but the parse is empty");
  auto ids = vocab.encode(linear_tokens);
  Eigen::MatrixXd x = embedding.lookup(ids);
  Eigen::MatrixXd h = lstm.forward(x, cache ? &cache->lstm : nullptr);
  const Eigen::Index H = static_cast<Eigen::Index>(lstm.hidden());
  Eigen::VectorXd out(2 * H);
  out.head(H) = h.col(h.cols() - 1).head(H);
  out.tail(H) = h.col(0).tail(H);
  if (cache) cache->ids = std::move(ids);
  return out;
}

void ParseEncoder::backward(const Cache& cache, const Eigen::VectorXd& dvec) {
  const Eigen::Index H = static_cast<Eigen::Index>(lstm.hidden());
  const auto n = static_cast<Eigen::Index>(cache.ids.size());
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(2 * H, n);
  dh.col(n - 1).head(H) += dvec.head(H);
  dh.col(0).tail(H) += dvec.tail(H);
  Eigen::MatrixXd dx = lstm.backward(cache.lstm, dh);
  embedding.backward(cache.ids, dx);
}

ParamList ParseEncoder::params() {
  ParamList out{&embedding.table};
  for (auto* p : lstm.params()) out.push_back(p);
  return out;
}

Eigen::MatrixXd fuse_features(const Eigen::MatrixXd& tokens, const Eigen::VectorXd& parse,
                              std::size_t token_width, std::size_t parse_width) {
  if (static_cast<std::size_t>(tokens.rows()) != token_width ||
      static_cast<std::size_t>(parse.size()) != parse_width) {
    throw ConfigError("feature width mismatch: got " + std::to_string(tokens.rows()) + " + " +
                      std::to_string(parse.size()) + ", configured " +
                      std::to_string(token_width) + " + " + std::to_string(parse_width));
  }
  Eigen::MatrixXd out(tokens.rows() + parse.size(), tokens.cols());
  out.topRows(tokens.rows()) = tokens;
  if (parse.size() > 0) out.bottomRows(parse.size()).colwise() = parse;
  return out;
}

TokenEncoder::TokenEncoder(const EncoderConfig& cfg, Vocabulary v,
                           std::optional<Vocabulary> parse_vocab, std::size_t input_dim, Rng* rng)
    : vocab(std::move(v)), lstm("encoder.lstm", input_dim, cfg.hidden, rng), cfg_(cfg),
      input_dim_(input_dim) {
  if (cfg.input_mode != InputMode::kContextual) {
    if (input_dim != cfg.emb_dim) throw ConfigError("embedding input width must equal emb_dim");
    embedding.emplace("encoder.embedding", vocab.size(), cfg.emb_dim, rng);
  }
  if (cfg.parse_features) {
    if (!parse_vocab) throw ConfigError("parse features enabled without a parse vocabulary");
    parse.emplace(std::move(*parse_vocab), cfg.parse_emb_dim, cfg.parse_hidden, rng);
  }
}

Eigen::MatrixXd TokenEncoder::embed(const std::vector<std::string>& tokens,
                                    std::vector<std::size_t>* ids) const {
  auto v = vocab.encode(tokens);
  Eigen::MatrixXd x = embed_ids(v);
  if (ids) *ids = std::move(v);
  return x;
}

Eigen::MatrixXd TokenEncoder::embed_ids(const std::vector<std::size_t>& ids) const {
  if (!embedding) throw ConfigError("encoder has no embedding table in contextual mode");
  return embedding->lookup(ids);
}

Eigen::MatrixXd TokenEncoder::encode(const Eigen::MatrixXd& x, const std::string& parse_tree,
                                     Cache* cache) const {
  if (static_cast<std::size_t>(x.rows()) != input_dim_) {
    throw ConfigError("encoder input width " + std::to_string(x.rows()) + " != " +
                      std::to_string(input_dim_));
  }
  Eigen::MatrixXd h = lstm.forward(x, cache ? &cache->lstm : nullptr);
  Eigen::VectorXd pvec(0);
  if (parse) {
    if (parse_tree.empty()) {
      throw ConfigError("model uses parse features but the sentence has no parse");
    }
    pvec = parse->encode(linearize_parse(parse_tree, cfg_.parse_mode),
                         cache ? &cache->parse : nullptr);
  }
  return fuse_features(h, pvec, token_dim(), parse_dim());
}

Eigen::MatrixXd TokenEncoder::backward(const Cache& cache, const Eigen::MatrixXd& dout) {
  const auto T = static_cast<Eigen::Index>(token_dim());
  if (parse) {
    Eigen::VectorXd dp = dout.bottomRows(dout.rows() - T).rowwise().sum();
    parse->backward(cache.parse, dp);
  }
  return lstm.backward(cache.lstm, dout.topRows(T));
}

void TokenEncoder::backward_embedding(const std::vector<std::size_t>& ids,
                                      const Eigen::MatrixXd& dx) {
  if (embedding) embedding->backward(ids, dx);
}

ParamList TokenEncoder::params() {
  ParamList out;
  if (embedding) out.push_back(&embedding->table);
  for (auto* p : lstm.params()) out.push_back(p);
  if (parse) {
    for (auto* p : parse->params()) out.push_back(p);
  }
  return out;
}

json TokenEncoder::meta_to_json() const {
  json j = {{"config", cfg_.to_json()},
            {"input_dim", input_dim_},
            {"vocab", vocab.tokens()},
            {"vocab_reserved", vocab.num_reserved()}};
  if (parse) j["parse_vocab"] = parse->vocab.tokens();
  return j;
}

TokenEncoder TokenEncoder::from_meta_json(const json& j) {
  auto cfg = EncoderConfig::from_json(j.at("config"));
  auto vocab = Vocabulary::from_tokens(j.at("vocab").get<std::vector<std::string>>(),
                                       j.at("vocab_reserved").get<std::size_t>());
  std::optional<Vocabulary> pv;
  if (cfg.parse_features) {
    pv = Vocabulary::from_tokens(j.at("parse_vocab").get<std::vector<std::string>>(), 2);
  }
  return TokenEncoder(cfg, std::move(vocab), std::move(pv), j.at("input_dim").get<std::size_t>(),
                      nullptr);
}

Vocabulary build_parse_vocab(const std::vector<std::string>& parses, LinearizeMode mode) {
  std::vector<std::string> stream;
  for (const auto& p : parses) {
    if (p.empty()) continue;
    auto lin = linearize_parse(p, mode);
    stream.insert(stream.end(), lin.begin(), lin.end());
  }
  return Vocabulary::build(stream, 50000);
}

}  // namespace intrarel
