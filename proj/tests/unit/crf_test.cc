#include <doctest.h>

#include <array>
#include <cmath>

#include "intrarel/crf.h"
#include "support.h"

using namespace intrarel;
using testing::all_sequences;

namespace {

Emissions zeros(long n) { return Emissions::Zero(n, kNumLabels); }

}  // namespace

TEST_CASE("sequence scores") {
  CrfParams c;
  CHECK(score_sequence(c, zeros(1), {BioLabel::kO}) == 0.0);
  c.transitions(0, 0) = 1.0;
  CHECK(score_sequence(c, zeros(2), {BioLabel::kO, BioLabel::kO}) == 1.0);
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = testing::random_crf(rng, 2.0);
    Emissions e = testing::random_matrix(rng, 4, kNumLabels, 2.0);
    auto tags = testing::random_valid_tags(rng, 4);
    CHECK(score_sequence(r, e, tags) == doctest::Approx(testing::term_sum(r, e, tags)).epsilon(1e-14));
  }
}

TEST_CASE("log partition") {
  CHECK(log_partition(CrfParams{}, zeros(1)) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    auto r = testing::random_crf(rng, 1.5);
    Emissions e = testing::random_matrix(rng, 3, kNumLabels, 1.5);
    CHECK(std::abs(log_partition(r, e) - testing::brute_log_partition(r, e)) < 1e-9);
    Emissions shifted = e;
    shifted.row(1).array() += 3.25;
    CHECK(log_partition(r, shifted) - log_partition(r, e) == doctest::Approx(3.25).epsilon(1e-12));
  }
}

TEST_CASE("probabilities over all sequences sum to one") {
  Rng rng(3);
  for (long n = 1; n <= 5; ++n) {
    auto r = testing::random_crf(rng, 1.0);
    Emissions e = testing::random_matrix(rng, n, kNumLabels, 1.0);
    double z = log_partition(r, e);
    double total = 0.0;
    for (const auto& t : all_sequences(static_cast<std::size_t>(n))) {
      double p = std::exp(score_sequence(r, e, t) - z);
      CHECK(p > 0.0);
      CHECK(p <= 1.0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("log partition is invariant to a consistent label permutation") {
  Rng rng(4);
  std::array<int, 5> perm = {3, 0, 4, 1, 2};
  auto r = testing::random_crf(rng, 1.0);
  Emissions e = testing::random_matrix(rng, 4, kNumLabels, 1.0);
  CrfParams pr = r;
  Emissions pe = e;
  for (int a = 0; a < 5; ++a) {
    pr.start(perm[a]) = r.start(a);
    pr.end(perm[a]) = r.end(a);
    pe.col(perm[a]) = e.col(a);
    for (int b = 0; b < 5; ++b) pr.transitions(perm[a], perm[b]) = r.transitions(a, b);
  }
  CHECK(std::abs(log_partition(pr, pe) - log_partition(r, e)) < 1e-12);
}

TEST_CASE("negative log-likelihood") {
  Rng rng(5);
  TagSequence gold = {BioLabel::kBArg1, BioLabel::kIArg1, BioLabel::kO, BioLabel::kBArg2};
  Emissions peaked = zeros(4);
  for (std::size_t j = 0; j < gold.size(); ++j) peaked(static_cast<long>(j), static_cast<long>(gold[j])) = 100.0;
  CHECK(nll(CrfParams{}, peaked, gold).loss < 1e-3);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = testing::random_crf(rng, 3.0);
    Emissions e = testing::random_matrix(rng, 4, kNumLabels, 3.0);
    CHECK(nll(r, e, testing::random_valid_tags(rng, 4)).loss >= 0.0);
  }
}

TEST_CASE("NLL gradients equal enumerated expected minus observed counts") {
  Rng rng(6);
  for (long n = 1; n <= 4; ++n) {
    auto r = testing::random_crf(rng, 1.0);
    Emissions e = testing::random_matrix(rng, n, kNumLabels, 1.0);
    auto gold = testing::random_valid_tags(rng, static_cast<std::size_t>(n));
    auto res = nll(r, e, gold);
    double z = testing::brute_log_partition(r, e);
    Eigen::MatrixXd de = Eigen::MatrixXd::Zero(n, kNumLabels), dt = Eigen::MatrixXd::Zero(5, 5);
    Eigen::VectorXd ds = Eigen::VectorXd::Zero(5), dd = Eigen::VectorXd::Zero(5);
    auto add = [&](const TagSequence& t, double w) {
      for (long j = 0; j < n; ++j) {
        de(j, static_cast<int>(t[static_cast<std::size_t>(j)])) += w;
        if (j > 0) dt(static_cast<int>(t[static_cast<std::size_t>(j - 1)]), static_cast<int>(t[static_cast<std::size_t>(j)])) += w;
      }
      ds(static_cast<int>(t.front())) += w;
      dd(static_cast<int>(t.back())) += w;
    };
    for (const auto& t : all_sequences(static_cast<std::size_t>(n))) add(t, std::exp(testing::term_sum(r, e, t) - z));
    add(gold, -1.0);
    CHECK((res.grad.emissions - de).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((res.grad.transitions - dt).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((res.grad.start - ds).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((res.grad.end - dd).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(res.loss - (z - testing::term_sum(r, e, gold))) < 1e-9);
  }
}

TEST_CASE("NLL gradients match central differences") {
  Rng rng(7);
  auto r = testing::random_crf(rng, 1.0);
  Param em("emissions", testing::random_matrix(rng, 3, kNumLabels, 1.0));
  Param tr("transitions", r.transitions), st("start", r.start), en("end", r.end);
  TagSequence gold = {BioLabel::kO, BioLabel::kBArg2, BioLabel::kIArg2};
  auto params = [&] { return CrfParams{tr.value, st.value.col(0), en.value.col(0)}; };
  auto loss = [&] { return nll(params(), em.value, gold).loss; };
  auto grad = [&] {
    auto res = nll(params(), em.value, gold);
    em.grad += res.grad.emissions;
    tr.grad += res.grad.transitions;
    st.grad += res.grad.start;
    en.grad += res.grad.end;
  };
  auto check = testing::check_gradients({&em, &tr, &st, &en}, loss, grad);
  CHECK_MESSAGE(check.worst < 1e-6, check.where);
}

TEST_CASE("marginals sum to one per position") {
  Rng rng(8);
  auto r = testing::random_crf(rng, 1.0);
  Emissions e = testing::random_matrix(rng, 5, kNumLabels, 1.0);
  auto m = marginals(r, e);
  for (long j = 0; j < 5; ++j) CHECK(std::abs(m.row(j).sum() - 1.0) < 1e-12);
}

TEST_CASE("BIO mask") {
  auto m = bio_mask();
  const auto O = 0, B1 = 1, I1 = 2, B2 = 3, I2 = 4;
  CHECK_FALSE(m.transition[O][I1]);
  CHECK(m.transition[B2][I2]);
  CHECK(m.transition[I2][I2]);
  CHECK_FALSE(m.transition[B1][I2]);
  CHECK_FALSE(m.transition[I1][I2]);
  CHECK(m.transition[I1][B2]);
  CHECK_FALSE(m.start[I2]);
  CHECK_FALSE(m.start[I1]);
  CHECK(m.start[B1]);
  for (bool e : m.end) CHECK(e);
  for (const auto& t : all_sequences(4)) CHECK(testing::admissible(m, t) == is_bio_valid(t));
}

TEST_CASE("Viterbi tie-break and feasibility") {
  auto d = viterbi_decode(CrfParams{}, zeros(4), bio_mask());
  CHECK(d.tags == TagSequence(4, BioLabel::kO));
  CHECK(d.score == 0.0);
  Emissions one = zeros(1);
  one(0, static_cast<long>(BioLabel::kIArg1)) = 50.0;
  auto single = viterbi_decode(CrfParams{}, one, bio_mask());
  CHECK(single.tags.size() == 1);
  CHECK(single.tags[0] != BioLabel::kIArg1);
  CHECK(single.tags[0] != BioLabel::kIArg2);
}

TEST_CASE("Viterbi matches brute force over admissible sequences") {
  Rng rng(9);
  auto mask = bio_mask();
  for (int trial = 0; trial < 100; ++trial) {
    const long n = 1 + static_cast<long>(uniform_index(rng, 6));
    auto r = testing::random_crf(rng, 2.0);
    Emissions e = testing::random_matrix(rng, n, kNumLabels, 2.0);
    double best = -1e300;
    for (const auto& t : all_sequences(static_cast<std::size_t>(n))) {
      if (testing::admissible(mask, t)) best = std::max(best, testing::term_sum(r, e, t));
    }
    auto d = viterbi_decode(r, e, mask);
    CHECK(is_bio_valid(d.tags));
    CHECK(std::abs(d.score - best) < 1e-9);
    CHECK(std::abs(score_sequence(r, e, d.tags) - d.score) < 1e-9);
  }
}

TEST_CASE("constrained training penalizes invalid cells only") {
  Rng rng(10);
  auto r = testing::random_crf(rng, 1.0);
  Emissions e = testing::random_matrix(rng, 3, kNumLabels, 1.0);
  auto mask = bio_mask();
  double z_masked = log_partition(r, e, &mask);
  double acc = 0.0;
  for (const auto& t : all_sequences(3)) {
    double s = testing::term_sum(r, e, t);
    if (!mask.start[static_cast<int>(t[0])]) s += kMaskedScore;
    for (std::size_t j = 1; j < 3; ++j) {
      if (!mask.transition[static_cast<int>(t[j - 1])][static_cast<int>(t[j])]) s += kMaskedScore;
    }
    acc += std::exp(s);
  }
  CHECK(std::abs(z_masked - std::log(acc)) < 1e-9);
  CHECK(z_masked < log_partition(r, e));
}
