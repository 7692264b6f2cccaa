#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "intrarel/error.h"
#include "intrarel/eval.h"
#include "support.h"

using namespace intrarel;

namespace {

ArgumentSpan a1(std::size_t s, std::size_t e) { return {Role::kArg1, {s, e}}; }
ArgumentSpan a2(std::size_t s, std::size_t e) { return {Role::kArg2, {s, e}}; }

// Multiset intersection size of same-role intervals, per key.
std::size_t oracle_hits(const std::vector<KeyedSpans>& gold, const std::vector<KeyedSpans>& pred, Role role) {
  std::size_t hits = 0;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    std::vector<Span> g, p;
    for (const auto& s : gold[k].spans) if (s.role == role) g.push_back(s.span);
    for (const auto& s : pred[k].spans) if (s.role == role) p.push_back(s.span);
    std::sort(g.begin(), g.end());
    std::sort(p.begin(), p.end());
    std::vector<Span> both;
    std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(both));
    hits += both.size();
  }
  return hits;
}

}  // namespace

TEST_CASE("PRF from counts") {
  auto p = PRF::from_counts(2, 3, 2);
  CHECK(p.precision == doctest::Approx(66.6667).epsilon(1e-4));
  CHECK(p.recall == 100.0);
  CHECK(p.f1 == doctest::Approx(80.0));
  auto z = PRF::from_counts(0, 0, 5);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);
  CHECK(PRF::from_counts(0, 0, 0).f1 == 0.0);
}

TEST_CASE("exact match hand cases") {
  std::vector<KeyedSpans> gold = {{"k1", {a1(0, 3), a2(4, 6)}}, {"k2", {a1(1, 2), a2(3, 5)}}};
  std::vector<KeyedSpans> pred = {{"k1", {a1(0, 3), a2(4, 6), a2(7, 8)}}, {"k2", {a1(1, 3), a2(3, 5)}}};
  auto r = exact_match(gold, pred);
  CHECK(r.arg2.precision == doctest::Approx(200.0 / 3.0));
  CHECK(r.arg2.recall == 100.0);
  CHECK(r.arg2.f1 == doctest::Approx(80.0));
  CHECK(r.arg1.true_positives == 1);
  CHECK(r.arg1.f1 == doctest::Approx(50.0));

  SUBCASE("off by one is a miss") {
    std::vector<KeyedSpans> g = {{"k", {a1(2, 5)}}};
    std::vector<KeyedSpans> p = {{"k", {a1(2, 6)}}};
    CHECK(exact_match(g, p).arg1.true_positives == 0);
  }
  SUBCASE("a duplicate prediction matches once") {
    std::vector<KeyedSpans> g = {{"k", {a1(2, 5)}}};
    std::vector<KeyedSpans> p = {{"k", {a1(2, 5), a1(2, 5)}}};
    auto d = exact_match(g, p).arg1;
    CHECK(d.true_positives == 1);
    CHECK(d.predicted == 2);
  }
  SUBCASE("role matters") {
    std::vector<KeyedSpans> g = {{"k", {a1(2, 5)}}};
    std::vector<KeyedSpans> p = {{"k", {a2(2, 5)}}};
    CHECK(exact_match(g, p).arg1.true_positives == 0);
  }
  SUBCASE("key mismatches are rejected") {
    CHECK_THROWS_AS(exact_match(gold, {{"k1", {}}, {"k3", {}}}), ValidationError);
    CHECK_THROWS_AS(exact_match(gold, {pred[0]}), ValidationError);
    CHECK_THROWS_AS(exact_match({gold[0], gold[0]}, {pred[0], pred[0]}), ValidationError);
  }
  auto perfect = exact_match(gold, gold);
  CHECK(perfect.arg1.f1 == 100.0);
  CHECK(perfect.arg2.f1 == 100.0);
}

TEST_CASE("exact match agrees with a set-intersection oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<KeyedSpans> gold, pred;
    for (int k = 0; k < 4; ++k) {
      auto rand_spans = [&] {
        std::vector<ArgumentSpan> v;
        for (std::size_t i = 0, n = uniform_index(rng, 4); i < n; ++i) {
          std::size_t s = uniform_index(rng, 4);
          ArgumentSpan a{bernoulli(rng, 0.5) ? Role::kArg1 : Role::kArg2, {s, s + 1 + uniform_index(rng, 2)}};
          v.push_back(a);
        }
        return v;
      };
      // Gold spans of one role are distinct within a unit.
      auto g = rand_spans();
      std::vector<ArgumentSpan> uniq;
      for (const auto& s : g) if (std::find(uniq.begin(), uniq.end(), s) == uniq.end()) uniq.push_back(s);
      gold.push_back({"k" + std::to_string(k), uniq});
      pred.push_back({"k" + std::to_string(k), rand_spans()});
    }
    auto r = exact_match(gold, pred);
    CHECK(r.arg1.true_positives == oracle_hits(gold, pred, Role::kArg1));
    CHECK(r.arg2.true_positives == oracle_hits(gold, pred, Role::kArg2));
    CHECK(r.arg1.f1 <= 100.0);
    CHECK(r.arg1.f1 >= 0.0);
  }
}

TEST_CASE("token scores") {
  using B = BioLabel;
  std::vector<TagSequence> gold = {{B::kO, B::kBArg1, B::kIArg1, B::kO}};
  std::vector<TagSequence> pred = {{B::kO, B::kBArg1, B::kO, B::kO}};
  auto t = token_prf(gold, pred);
  CHECK(t[label_index(B::kO)].precision == doctest::Approx(200.0 / 3.0));
  CHECK(t[label_index(B::kO)].recall == 100.0);
  CHECK(t[label_index(B::kIArg1)].recall == 0.0);
  CHECK(t[label_index(B::kBArg1)].f1 == 100.0);
  CHECK(token_accuracy(gold, pred) == doctest::Approx(75.0));
  CHECK_THROWS_AS(token_prf(gold, {{B::kO}}), ValidationError);
}

TEST_CASE("argument order scores") {
  CHECK(argument_order({a1(0, 2), a2(3, 4)}) == ArgOrder::kArg1Arg2);
  CHECK(argument_order({a2(0, 2), a1(3, 4)}) == ArgOrder::kArg2Arg1);
  CHECK_FALSE(argument_order({a1(0, 2)}).has_value());
  std::vector<KeyedSpans> gold = {{"a", {a1(0, 1), a2(2, 3)}}, {"b", {a2(0, 1), a1(2, 3)}}, {"c", {}}};
  std::vector<KeyedSpans> pred = {{"a", {a1(0, 1), a2(2, 3)}}, {"b", {a1(0, 1), a2(2, 3)}}, {"c", {a1(0, 1), a2(2, 3)}}};
  auto o = order_score(gold, pred);
  CHECK(o.arg1_arg2.support == 1);
  CHECK(o.arg1_arg2.predicted == 2);
  CHECK(o.arg1_arg2.true_positives == 1);
  CHECK(o.arg2_arg1.support == 1);
  CHECK(o.arg2_arg1.recall == 0.0);
}

TEST_CASE("sense report") {
  using S = SenseLabel;
  std::vector<S> gold = {S::kContingencyCause, S::kContingencyCause, S::kExpansionConjunction, S::kContingencyPurpose};
  std::vector<S> pred = {S::kContingencyCause, S::kExpansionConjunction, S::kExpansionConjunction, S::kContingencyCause};
  auto r = sense_report(gold, pred);
  CHECK(r.n == 4);
  CHECK(r.accuracy == doctest::Approx(50.0));
  CHECK(r.micro.f1 == doctest::Approx(50.0));
  auto cause = r.per_sense[sense_index(S::kContingencyCause)];
  CHECK(cause.precision == doctest::Approx(50.0));
  CHECK(cause.recall == doctest::Approx(50.0));
  auto conj = r.per_sense[sense_index(S::kExpansionConjunction)];
  CHECK(conj.f1 == doctest::Approx(200.0 / 3.0));
  CHECK(r.weighted.f1 == doctest::Approx((2 * 50.0 + 200.0 / 3.0 + 0.0) / 4.0));
  CHECK(r.confusion[sense_index(S::kContingencyCause)][sense_index(S::kExpansionConjunction)] == 1);
  std::size_t total = 0;
  for (const auto& row : r.confusion) for (auto c : row) total += c;
  CHECK(total == 4);
  auto csv = confusion_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(kNumSenses + 1));
}

TEST_CASE("slices") {
  std::vector<SliceItem> items;
  auto item = [&](std::string key, std::size_t k, std::size_t pos, bool hit, SenseLabel s) {
    SliceItem it;
    it.gold = {key, {a1(0, 2), a2(3, 4)}};
    it.pred = {key, hit ? it.gold.spans : std::vector<ArgumentSpan>{a1(0, 1)}};
    it.relations_in_sentence = k;
    it.position = pos;
    it.sense = s;
    items.push_back(it);
  };
  item("s1", 1, 0, true, SenseLabel::kContingencyCause);
  item("s2a", 2, 0, true, SenseLabel::kContingencyCause);
  item("s2b", 2, 1, false, SenseLabel::kContingencyPurpose);
  item("s3a", 3, 0, true, SenseLabel::kContingencyCause);
  item("s3b", 3, 1, false, SenseLabel::kContingencyPurpose);
  item("s3c", 3, 2, false, SenseLabel::kContingencyPurpose);
  auto slices = slice_eval(items, 2);
  auto find = [&](const std::string& n) {
    auto it = std::find_if(slices.begin(), slices.end(), [&](const SliceReport& s) { return s.name == n; });
    REQUIRE(it != slices.end());
    return *it;
  };
  CHECK(find("multi-relation").size == 5);
  CHECK(find("multi-relation-left").size == 3);
  CHECK(find("multi-relation-left").exact.arg2.f1 == doctest::Approx(80.0));
  CHECK(find("multi-relation-right").size == 2);
  CHECK(find("multi-relation-right").exact.arg2.true_positives == 0);
  CHECK(find("sense:Contingency.Cause").size == 3);
  CHECK(find("sense:Contingency.Purpose").size == 3);
  auto strict = slice_eval(items, 3);
  CHECK(std::none_of(strict.begin(), strict.end(), [](const SliceReport& s) { return s.name.starts_with("sense:"); }));
}

TEST_CASE("reports serialize and aggregate") {
  EvalReport a;
  a.name = "fold";
  a.n_examples = 10;
  a.exact = RolePRF{PRF::from_counts(5, 10, 10), PRF::from_counts(6, 10, 10)};
  a.token_accuracy = 90.0;
  auto back = EvalReport::from_json(a.to_json());
  CHECK(back.flatten() == a.flatten());
  CHECK(a.flatten().at("exact.arg1.f1") == doctest::Approx(50.0));
  CHECK_THROWS_AS(EvalReport::from_json(nlohmann::json::array()), FormatError);

  EvalReport b = a;
  b.exact->arg1 = PRF::from_counts(6, 10, 10);
  auto s = crossval_aggregate({a, b});
  CHECK(s.folds == 2);
  CHECK(s.metrics.at("exact.arg1.f1").mean == doctest::Approx(55.0));
  CHECK(s.metrics.at("exact.arg1.f1").std == doctest::Approx(std::sqrt(50.0)));
  CHECK(s.metrics.at("exact.arg2.f1").std == doctest::Approx(0.0));
  CHECK_THROWS_AS(crossval_aggregate({a}), ValidationError);
  EvalReport c = a;
  c.token_accuracy.reset();
  CHECK_THROWS_AS(crossval_aggregate({a, c}), ValidationError);
  CHECK(format_crossval_table(s).find("exact.arg1.f1") != std::string::npos);
  CHECK_FALSE(format_report(a).empty());
}
