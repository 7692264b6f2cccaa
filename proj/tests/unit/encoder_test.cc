#include <doctest.h>

#include "intrarel/encoder.h"
#include "intrarel/error.h"
#include "support.h"

using namespace intrarel;

namespace {

const char* kTree = "(S (NP (DT the) (NN dog)) (VP (VBZ barks)))";

EncoderConfig small_config(bool parse) {
  EncoderConfig c;
  c.emb_dim = 3;
  c.hidden = 2;
  c.parse_features = parse;
  c.parse_emb_dim = 2;
  c.parse_hidden = 2;
  return c;
}

}  // namespace

TEST_CASE("fuse_features broadcasts and slices back") {
  Rng rng(1);
  auto tok = testing::random_matrix(rng, 4, 3, 1.0);
  Eigen::VectorXd parse = testing::random_matrix(rng, 2, 1, 1.0);
  auto fused = fuse_features(tok, parse, 4, 2);
  CHECK(fused.rows() == 6);
  CHECK(fused.cols() == 3);
  CHECK(fused.topRows(4) == tok);
  for (long j = 0; j < 3; ++j) CHECK(fused.col(j).tail(2) == parse);
  CHECK(fuse_features(tok, Eigen::VectorXd(0), 4, 0) == tok);
  CHECK_THROWS_AS(fuse_features(tok, parse, 4, 3), ConfigError);
  CHECK_THROWS_AS(fuse_features(tok, parse, 5, 2), ConfigError);
}

TEST_CASE("parse encoder summary") {
  auto vocab = build_parse_vocab({kTree}, LinearizeMode::kLabelsOnly);
  ParseEncoder zero(vocab, 2, 3, nullptr);
  CHECK(zero.encode(linearize_parse(kTree), nullptr).isZero());
  CHECK_THROWS_AS(zero.encode({}, nullptr), ConfigError);

  Rng rng(2);
  ParseEncoder pe(vocab, 2, 3, &rng);
  auto lin = linearize_parse(kTree);
  auto v = pe.encode(lin, nullptr);
  CHECK(v.size() == 6);
  CHECK(pe.encode(lin, nullptr) == v);

  auto x = pe.embedding.lookup(vocab.encode(lin));
  auto f = testing::reference_lstm(pe.lstm.fwd.W.value, pe.lstm.fwd.U.value, pe.lstm.fwd.b.value, x, false);
  auto b = testing::reference_lstm(pe.lstm.bwd.W.value, pe.lstm.bwd.U.value, pe.lstm.bwd.b.value, x, true);
  CHECK((v.head(3) - f.col(f.cols() - 1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((v.tail(3) - b.col(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("token encoder requires a parse when parse features are on") {
  auto vocab = Vocabulary::build(std::vector<std::string>{"the", "dog", "barks"}, 10);
  Rng rng(3);
  TokenEncoder enc(small_config(true), vocab, build_parse_vocab({kTree}, LinearizeMode::kLabelsOnly), 3, &rng);
  auto x = enc.embed({"the", "dog", "barks"}, nullptr);
  CHECK(enc.encode(x, kTree, nullptr).rows() == 8);
  CHECK_THROWS_AS(enc.encode(x, "", nullptr), ConfigError);
  CHECK_THROWS_AS(TokenEncoder(small_config(true), vocab, std::nullopt, 3, &rng), ConfigError);
}

TEST_CASE("embedding, BiLSTM and parse fusion gradients") {
  auto vocab = Vocabulary::build(std::vector<std::string>{"the", "dog", "barks", "loud"}, 10);
  Rng rng(4);
  TokenEncoder enc(small_config(true), vocab, build_parse_vocab({kTree}, LinearizeMode::kLabelsOnly), 3, &rng);
  for (auto* p : enc.params()) p->value += testing::random_matrix(rng, p->value.rows(), p->value.cols(), 0.3);
  std::vector<std::string> toks = {"the", "dog", "barks"};
  Eigen::MatrixXd w = testing::random_matrix(rng, 8, 3, 1.0);
  auto loss = [&] { return (enc.encode(enc.embed(toks, nullptr), kTree, nullptr).array() * w.array()).sum(); };
  auto grad = [&] {
    std::vector<std::size_t> ids;
    TokenEncoder::Cache cache;
    enc.encode(enc.embed(toks, &ids), kTree, &cache);
    enc.backward_embedding(ids, enc.backward(cache, w));
  };
  auto r = testing::check_gradients(enc.params(), loss, grad);
  CHECK_MESSAGE(r.worst < 1e-4, r.where);
}

TEST_CASE("encoder metadata round-trips") {
  auto vocab = Vocabulary::build(std::vector<std::string>{"a", "b"}, 10);
  Rng rng(5);
  TokenEncoder enc(small_config(true), vocab, build_parse_vocab({kTree}, LinearizeMode::kLabelsOnly), 3, &rng);
  auto back = TokenEncoder::from_meta_json(enc.meta_to_json());
  CHECK(back.vocab.tokens() == enc.vocab.tokens());
  CHECK(back.output_dim() == enc.output_dim());
  CHECK(back.parse->vocab.tokens() == enc.parse->vocab.tokens());
  CHECK(EncoderConfig::from_json(enc.config().to_json()).parse_hidden == 2);
  CHECK_THROWS_AS(parse_input_mode("bert"), ConfigError);
}
