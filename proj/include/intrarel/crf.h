#ifndef INTRAREL_CRF_H_
#define INTRAREL_CRF_H_

#include <array>

#include <Eigen/Dense>

#include "intrarel/bio.h"

namespace intrarel {

// Emission scores, one row per token and one column per BIO label.
using Emissions = Eigen::MatrixXd;

// Linear-chain CRF scores over the five BIO labels.
// transitions(from, to) scores label `from` at j-1 followed by `to` at j.
struct CrfParams {
  Eigen::MatrixXd transitions = Eigen::MatrixXd::Zero(kNumLabels, kNumLabels);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(kNumLabels);
  Eigen::VectorXd end = Eigen::VectorXd::Zero(kNumLabels);
};

// true = allowed.
struct ConstraintMask {
  std::array<std::array<bool, kNumLabels>, kNumLabels> transition{};
  std::array<bool, kNumLabels> start{};
  std::array<bool, kNumLabels> end{};
};

// I-X only after B-X or I-X, never first; any label may end a sequence.
ConstraintMask bio_mask();
ConstraintMask unconstrained_mask();

// Score added to masked cells when training is constrained.
inline constexpr double kMaskedScore = -1e4;

double score_sequence(const CrfParams& crf, const Emissions& emissions, const TagSequence& tags);

// log of the sum of exp(score) over all label sequences (forward algorithm).
// With a mask, disallowed cells receive kMaskedScore.
double log_partition(const CrfParams& crf, const Emissions& emissions,
                     const ConstraintMask* mask = nullptr);

struct CrfGradients {
  Eigen::MatrixXd emissions;
  Eigen::MatrixXd transitions;
  Eigen::VectorXd start;
  Eigen::VectorXd end;
};

struct NllResult {
  double loss = 0.0;
  CrfGradients grad;
};

// loss = log_partition - score_sequence(gold); gradients are expected minus
// observed feature counts.
NllResult nll(const CrfParams& crf, const Emissions& emissions, const TagSequence& gold,
              const ConstraintMask* mask = nullptr);

// Per-position label marginals P(y_j = l), n x L.
Eigen::MatrixXd marginals(const CrfParams& crf, const Emissions& emissions,
                          const ConstraintMask* mask = nullptr);

struct Decoded {
  TagSequence tags;
  double score = 0.0;
};

// Highest-scoring sequence among those the mask admits. Disallowed cells are
// excluded outright, so the returned score is score_sequence(tags). Ties go to
// the lowest label index at every backtrack step.
Decoded viterbi_decode(const CrfParams& crf, const Emissions& emissions,
                       const ConstraintMask& mask);

}  // namespace intrarel

#endif  // INTRAREL_CRF_H_
