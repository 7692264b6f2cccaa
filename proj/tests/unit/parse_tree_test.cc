#include <doctest.h>

#include <algorithm>

#include "intrarel/error.h"
#include "intrarel/fixture.h"
#include "intrarel/parse_tree.h"

using namespace intrarel;

TEST_CASE("labels-only linearization") {
  auto t = linearize_parse("(S (NP (NN dog)) (VP (VBZ barks)))", LinearizeMode::kLabelsOnly);
  std::vector<std::string> want = {"(S", "(NP", "(NN", ")", ")", "(VP", "(VBZ", ")", ")", ")"};
  CHECK(t == want);
}

TEST_CASE("linearization keeping terminals") {
  auto t = linearize_parse("(S (NP (NN dog)) (VP (VBZ barks)))", LinearizeMode::kLabelsAndTerminals);
  std::vector<std::string> want = {"(S", "(NP", "(NN", "dog", ")", ")", "(VP", "(VBZ", "barks", ")", ")", ")"};
  CHECK(t == want);
}

TEST_CASE("malformed trees are rejected") {
  CHECK_THROWS_AS(linearize_parse(""), ParseError);
  CHECK_THROWS_AS(linearize_parse("(S (NP (NN dog))"), ParseError);
  CHECK_THROWS_AS(linearize_parse("(S (NN dog)))"), ParseError);
}

TEST_CASE("terminal counting") {
  CHECK(count_terminals("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))") == 3);
  CHECK(terminals("( (S (NN a) (NN b)))") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("fixture trees linearize with balanced markers") {
  auto fx = generate_fixture(3, {.n_sentences = 50});
  for (const auto& s : fx.corpus) {
    auto t = linearize_parse(s.parse);
    auto opens = std::count_if(t.begin(), t.end(), [](const std::string& x) { return x.front() == '('; });
    auto closes = std::count(t.begin(), t.end(), std::string(")"));
    CHECK(opens == closes);
    CHECK(count_terminals(s.parse) == s.tokens.size());
  }
}
