#include "intrarel/crf.h"

#include <cmath>
#include <limits>

#include "intrarel/error.h"

namespace intrarel {
namespace {

constexpr auto L = static_cast<Eigen::Index>(kNumLabels);
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const Eigen::VectorXd& v) {
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// Scores with kMaskedScore folded into disallowed cells.
struct Effective {
  Eigen::MatrixXd trans;
  Eigen::VectorXd start;
  Eigen::VectorXd end;
};

Effective effective(const CrfParams& crf, const ConstraintMask* mask) {
  Effective e{crf.transitions, crf.start, crf.end};
  if (!mask) return e;
  for (Eigen::Index a = 0; a < L; ++a) {
    if (!mask->start[a]) e.start(a) += kMaskedScore;
    if (!mask->end[a]) e.end(a) += kMaskedScore;
    for (Eigen::Index b = 0; b < L; ++b) {
      if (!mask->transition[a][b]) e.trans(a, b) += kMaskedScore;
    }
  }
  return e;
}

void check_shape(const Emissions& em) {
  if (em.rows() < 1 || em.cols() != L) {
    throw ValidationError("emissions must be n x 5 with n >= 1");
  }
}

// alpha(j, y): log-sum of prefix scores ending in y at j (emission j included).
Eigen::MatrixXd forward_scores(const Effective& e, const Emissions& em) {
  const Eigen::Index n = em.rows();
  Eigen::MatrixXd alpha(n, L);
  alpha.row(0) = (e.start + em.row(0).transpose()).transpose();
  Eigen::VectorXd tmp(L);
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index b = 0; b < L; ++b) {
      for (Eigen::Index a = 0; a < L; ++a) tmp(a) = alpha(j - 1, a) + e.trans(a, b);
      alpha(j, b) = log_sum_exp(tmp) + em(j, b);
    }
  }
  return alpha;
}

// beta(j, y): log-sum of suffix scores after y at j (emission j excluded).
Eigen::MatrixXd backward_scores(const Effective& e, const Emissions& em) {
  const Eigen::Index n = em.rows();
  Eigen::MatrixXd beta(n, L);
  beta.row(n - 1) = e.end.transpose();
  Eigen::VectorXd tmp(L);
  for (Eigen::Index j = n - 2; j >= 0; --j) {
    for (Eigen::Index a = 0; a < L; ++a) {
      for (Eigen::Index b = 0; b < L; ++b) tmp(b) = e.trans(a, b) + em(j + 1, b) + beta(j + 1, b);
      beta(j, a) = log_sum_exp(tmp);
    }
  }
  return beta;
}

}  // namespace

ConstraintMask bio_mask() {
  ConstraintMask m;
  const auto I1 = label_index(BioLabel::kIArg1), I2 = label_index(BioLabel::kIArg2);
  const auto B1 = label_index(BioLabel::kBArg1), B2 = label_index(BioLabel::kBArg2);
  for (std::size_t a = 0; a < kNumLabels; ++a) {
    m.start[a] = a != I1 && a != I2;
    m.end[a] = true;
    for (std::size_t b = 0; b < kNumLabels; ++b) {
      if (b == I1) {
        m.transition[a][b] = a == B1 || a == I1;
      } else if (b == I2) {
        m.transition[a][b] = a == B2 || a == I2;
      } else {
        m.transition[a][b] = true;
      }
    }
  }
  return m;
}

ConstraintMask unconstrained_mask() {
  ConstraintMask m;
  for (auto& row : m.transition) row.fill(true);
  m.start.fill(true);
  m.end.fill(true);
  return m;
}

double score_sequence(const CrfParams& crf, const Emissions& em, const TagSequence& tags) {
  check_shape(em);
  if (tags.size() != static_cast<std::size_t>(em.rows())) {
    throw ValidationError("tag count differs from emission rows");
  }
  const auto first = static_cast<Eigen::Index>(label_index(tags.front()));
  const auto last = static_cast<Eigen::Index>(label_index(tags.back()));
  double s = crf.start(first) + crf.end(last);
  for (std::size_t j = 0; j < tags.size(); ++j) {
    const auto y = static_cast<Eigen::Index>(label_index(tags[j]));
    s += em(static_cast<Eigen::Index>(j), y);
    if (j > 0) s += crf.transitions(static_cast<Eigen::Index>(label_index(tags[j - 1])), y);
  }
  return s;
}

double log_partition(const CrfParams& crf, const Emissions& em, const ConstraintMask* mask) {
  check_shape(em);
  auto e = effective(crf, mask);
  Eigen::MatrixXd alpha = forward_scores(e, em);
  return log_sum_exp(alpha.row(em.rows() - 1).transpose() + e.end);
}

Eigen::MatrixXd marginals(const CrfParams& crf, const Emissions& em, const ConstraintMask* mask) {
  check_shape(em);
  auto e = effective(crf, mask);
  Eigen::MatrixXd alpha = forward_scores(e, em);
  Eigen::MatrixXd beta = backward_scores(e, em);
  double logz = log_sum_exp(alpha.row(em.rows() - 1).transpose() + e.end);
  return (alpha + beta).array().unaryExpr([logz](double v) { return std::exp(v - logz); });
}

NllResult nll(const CrfParams& crf, const Emissions& em, const TagSequence& gold,
              const ConstraintMask* mask) {
  check_shape(em);
  const Eigen::Index n = em.rows();
  if (gold.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("gold tag count differs from emission rows");
  }
  auto e = effective(crf, mask);
  Eigen::MatrixXd alpha = forward_scores(e, em);
  Eigen::MatrixXd beta = backward_scores(e, em);
  const double logz = log_sum_exp(alpha.row(n - 1).transpose() + e.end);

  NllResult r;
  CrfParams eff_params{e.trans, e.start, e.end};
  r.loss = logz - score_sequence(eff_params, em, gold);

  r.grad.emissions = (alpha + beta).array().unaryExpr([logz](double v) { return std::exp(v - logz); });
  r.grad.start = r.grad.emissions.row(0).transpose();
  r.grad.end = r.grad.emissions.row(n - 1).transpose();
  r.grad.transitions = Eigen::MatrixXd::Zero(L, L);
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index a = 0; a < L; ++a) {
      for (Eigen::Index b = 0; b < L; ++b) {
        r.grad.transitions(a, b) +=
            std::exp(alpha(j - 1, a) + e.trans(a, b) + em(j, b) + beta(j, b) - logz);
      }
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto y = static_cast<Eigen::Index>(label_index(gold[static_cast<std::size_t>(j)]));
    r.grad.emissions(j, y) -= 1.0;
    if (j > 0) {
      r.grad.transitions(static_cast<Eigen::Index>(label_index(gold[static_cast<std::size_t>(j - 1)])), y) -= 1.0;
    }
  }
  r.grad.start(static_cast<Eigen::Index>(label_index(gold.front()))) -= 1.0;
  r.grad.end(static_cast<Eigen::Index>(label_index(gold.back()))) -= 1.0;
  return r;
}

Decoded viterbi_decode(const CrfParams& crf, const Emissions& em, const ConstraintMask& mask) {
  check_shape(em);
  const Eigen::Index n = em.rows();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Constant(n, L, kNegInf);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(n, L);
  for (Eigen::Index a = 0; a < L; ++a) {
    if (mask.start[a]) delta(0, a) = crf.start(a) + em(0, a);
  }
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index b = 0; b < L; ++b) {
      double best = kNegInf;
      int arg = -1;
      for (Eigen::Index a = 0; a < L; ++a) {
        if (!mask.transition[a][b] || delta(j - 1, a) == kNegInf) continue;
        double s = delta(j - 1, a) + crf.transitions(a, b);
        if (arg < 0 || s > best) {
          best = s;
          arg = static_cast<int>(a);
        }
      }
      if (arg >= 0) {
        delta(j, b) = best + em(j, b);
        back(j, b) = arg;
      }
    }
  }
  double best = kNegInf;
  int last = -1;
  for (Eigen::Index a = 0; a < L; ++a) {
    if (!mask.end[a] || delta(n - 1, a) == kNegInf) continue;
    double s = delta(n - 1, a) + crf.end(a);
    if (last < 0 || s > best) {
      best = s;
      last = static_cast<int>(a);
    }
  }
  if (last < 0) throw ValidationError("constraint mask admits no label sequence");
  Decoded d;
  d.score = best;
  d.tags.resize(static_cast<std::size_t>(n));
  int y = last;
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    d.tags[static_cast<std::size_t>(j)] = label_from_index(static_cast<std::size_t>(y));
    if (j > 0) y = back(j, y);
  }
  return d;
}

}  // namespace intrarel
