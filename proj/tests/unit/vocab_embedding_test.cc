#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "intrarel/contextual.h"
#include "intrarel/embedding.h"
#include "intrarel/error.h"
#include "intrarel/fixture.h"
#include "intrarel/vocab.h"
#include "support.h"

using namespace intrarel;

TEST_CASE("vocabulary building") {
  auto v = Vocabulary::build(std::vector<std::string>{"a", "b", "a"}, 10);
  CHECK(v.size() == 4);
  CHECK(v.token(Vocabulary::kPad) == "<pad>");
  CHECK(v.token(Vocabulary::kUnk) == "<unk>");
  CHECK(v.id("a") == 2);
  CHECK(v.id("b") == 3);
  CHECK(v.id("zzz") == Vocabulary::kUnk);

  auto one = Vocabulary::build(std::vector<std::string>{"b", "a", "a", "c", "c"}, 1);
  CHECK(one.size() == 3);
  CHECK(one.contains("a"));  // tie with "c" goes to the lexicographically smaller token
  CHECK_FALSE(one.contains("c"));

  auto marked = Vocabulary::build(std::vector<std::string>{"x"}, 5, {"[CLS]", "[SEP]"});
  CHECK(marked.num_reserved() == 4);
  CHECK(marked.id("[CLS]") == 2);
  auto back = Vocabulary::from_tokens(marked.tokens(), marked.num_reserved());
  CHECK(back.tokens() == marked.tokens());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.id(v.token(i)) == i);
}

TEST_CASE("held-out OOV rate agrees with a recount") {
  auto train = generate_fixture(1, {.n_sentences = 30, .vocab_size = 200}).corpus;
  auto held = generate_fixture(2, {.n_sentences = 30, .vocab_size = 200}).corpus;
  std::vector<std::vector<std::string>> sents;
  std::set<std::string> seen;
  for (const auto& s : train) {
    sents.push_back(s.tokens);
    seen.insert(s.tokens.begin(), s.tokens.end());
  }
  auto v = Vocabulary::build(sents, 50000);
  std::size_t oov_lookup = 0, oov_recount = 0, total = 0;
  for (const auto& s : held) {
    for (const auto& t : s.tokens) {
      ++total;
      oov_lookup += v.id(t) == Vocabulary::kUnk;
      oov_recount += !seen.count(t);
    }
  }
  CHECK(total > 0);
  CHECK(oov_lookup == oov_recount);
}

TEST_CASE("embedding lookup and scatter") {
  Rng rng(3);
  Embedding e("emb", 6, 4, &rng);
  CHECK(e.table.value.cwiseAbs().maxCoeff() <= 0.05);
  auto x = e.lookup({2, 5, 2});
  CHECK(x.rows() == 4);
  CHECK(x.cols() == 3);
  CHECK(x.col(0) == e.table.value.row(2).transpose());
  e.table.zero_grad();
  e.backward({2, 5, 2}, Eigen::MatrixXd::Ones(4, 3));
  CHECK(e.table.grad(2, 0) == 2.0);
  CHECK(e.table.grad(5, 1) == 1.0);
  CHECK(e.table.grad(0, 0) == 0.0);
  Embedding z("z", 3, 2, nullptr);
  CHECK(z.table.value.isZero());
}

TEST_CASE("pretrained vector files") {
  auto dir = testing::temp_dir("pretrained");
  auto v = Vocabulary::build(std::vector<std::string>{"cat", "dog", "emu"}, 10);
  {
    std::ofstream f(dir / "full.txt");
    f << "cat 1 2 3\ndog 4 5 6\nemu 7 8 9\nyak 0 0 0\n";
    std::ofstream h(dir / "half.txt");
    h << "cat 1 2 3\n";
    std::ofstream n(dir / "narrow.txt");
    n << "cat 1 2\n";
    std::ofstream bad(dir / "ragged.txt");
    bad << "cat 1 2 3\ndog 1 2\n";
  }
  auto full = load_pretrained_vectors(dir / "full.txt", v, 3, 1);
  CHECK(full.covered == 3);
  CHECK(full.embedding.table.value.row(v.id("dog")) == Eigen::RowVector3d(4, 5, 6));

  auto a = load_pretrained_vectors(dir / "half.txt", v, 3, 9);
  auto b = load_pretrained_vectors(dir / "half.txt", v, 3, 9);
  CHECK(a.covered == 1);
  CHECK(a.embedding.table.value == b.embedding.table.value);
  CHECK(a.embedding.table.value.row(v.id("dog")).cwiseAbs().maxCoeff() <= 0.05);

  CHECK_THROWS_AS(load_pretrained_vectors(dir / "narrow.txt", v, 3, 1), FormatError);
  CHECK_THROWS_AS(load_pretrained_vectors(dir / "ragged.txt", v, 3, 1), FormatError);
}

TEST_CASE("contextual vectors") {
  auto corpus = generate_fixture(6, {.n_sentences = 12}).corpus;
  ContextualVectors cv;
  Rng rng(2);
  for (const auto& s : corpus) {
    cv.insert(s.doc_id, s.sent_index, testing::random_matrix(rng, 5, static_cast<long>(s.tokens.size()), 1.0));
  }
  auto dir = testing::temp_dir("contextual");
  cv.save(dir / "ctx.jsonl");
  auto back = ContextualVectors::load(dir / "ctx.jsonl", corpus);
  CHECK(back.dim() == 5);
  for (const auto& s : corpus) {
    CHECK(back.lookup(s) == cv.lookup(s));  // bitwise equal after the round trip
  }
  AnnotatedSentence missing = corpus[0];
  missing.doc_id = "nowhere";
  CHECK_THROWS_AS(back.lookup(missing), LookupError);
  AnnotatedSentence longer = corpus[0];
  longer.tokens.push_back("extra");
  CHECK_THROWS_AS(back.lookup(longer), ValidationError);

  ContextualVectors wrong;
  wrong.insert(corpus[0].doc_id, corpus[0].sent_index, Eigen::MatrixXd::Zero(5, 1));
  wrong.save(dir / "short.jsonl");
  try {
    ContextualVectors::load(dir / "short.jsonl", corpus);
    FAIL("expected a length mismatch");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(corpus[0].doc_id) != std::string::npos);
  }
  CHECK_THROWS_AS(cv.insert("x", 0, Eigen::MatrixXd::Zero(4, 2)), FormatError);
}
