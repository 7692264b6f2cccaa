#ifndef INTRAREL_TESTS_SUPPORT_H_
#define INTRAREL_TESTS_SUPPORT_H_

// Independent oracles shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "intrarel/bio.h"
#include "intrarel/crf.h"
#include "intrarel/param.h"
#include "intrarel/random.h"

namespace testing {

using intrarel::BioLabel;
using intrarel::ConstraintMask;
using intrarel::CrfParams;
using intrarel::Emissions;
using intrarel::kNumLabels;
using intrarel::Rng;
using intrarel::TagSequence;

// Every label sequence of length n, in lexicographic index order.
inline std::vector<TagSequence> all_sequences(std::size_t n) {
  std::vector<TagSequence> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    TagSequence t;
    for (auto i : idx) t.push_back(intrarel::label_from_index(i));
    out.push_back(t);
    std::size_t p = n;
    while (p > 0) {
      if (++idx[p - 1] < kNumLabels) break;
      idx[p - 1] = 0;
      --p;
    }
    if (p == 0) break;
  }
  return out;
}

// Term-by-term sequence score written without the library.
inline double term_sum(const CrfParams& c, const Emissions& e, const TagSequence& t) {
  double s = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    auto y = static_cast<int>(t[j]);
    s += e(static_cast<long>(j), y);
    if (j == 0) s += c.start(y);
    if (j + 1 == t.size()) s += c.end(y);
    if (j > 0) s += c.transitions(static_cast<int>(t[j - 1]), y);
  }
  return s;
}

inline bool admissible(const ConstraintMask& m, const TagSequence& t) {
  if (!m.start[static_cast<int>(t.front())] || !m.end[static_cast<int>(t.back())]) return false;
  for (std::size_t j = 1; j < t.size(); ++j) {
    if (!m.transition[static_cast<int>(t[j - 1])][static_cast<int>(t[j])]) return false;
  }
  return true;
}

inline double brute_log_partition(const CrfParams& c, const Emissions& e) {
  std::vector<double> scores;
  for (const auto& t : all_sequences(static_cast<std::size_t>(e.rows()))) scores.push_back(term_sum(c, e, t));
  double m = *std::max_element(scores.begin(), scores.end());
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - m);
  return m + std::log(acc);
}

inline Eigen::MatrixXd random_matrix(Rng& rng, long rows, long cols, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = intrarel::uniform(rng, -scale, scale);
  return m;
}

inline CrfParams random_crf(Rng& rng, double scale) {
  CrfParams c;
  c.transitions = random_matrix(rng, kNumLabels, kNumLabels, scale);
  c.start = random_matrix(rng, kNumLabels, 1, scale);
  c.end = random_matrix(rng, kNumLabels, 1, scale);
  return c;
}

inline TagSequence random_valid_tags(Rng& rng, std::size_t n) {
  TagSequence t;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<BioLabel> options = {BioLabel::kO, BioLabel::kBArg1, BioLabel::kBArg2};
    if (j > 0 && (t.back() == BioLabel::kBArg1 || t.back() == BioLabel::kIArg1)) options.push_back(BioLabel::kIArg1);
    if (j > 0 && (t.back() == BioLabel::kBArg2 || t.back() == BioLabel::kIArg2)) options.push_back(BioLabel::kIArg2);
    t.push_back(options[intrarel::uniform_index(rng, options.size())]);
  }
  return t;
}

struct GradCheck {
  double worst = 0.0;  // largest |a - n| / max(|a|, |n|, floor)
  std::string where;
  std::size_t checked = 0;
};

// kTwoPoint: (f(x+h) - f(x-h)) / 2h with h = 1e-5 * max(1, |theta|).
// kFourPoint: the fourth-order central stencil with h = 1e-3 * max(1, |theta|),
// which keeps roundoff well below tiny gradients of O(1) losses.
enum class Stencil { kTwoPoint, kFourPoint };

// Central differences over every element of every parameter. `loss`
// evaluates the scalar; `analytic` must leave the analytic gradient in the
// params' grad buffers.
inline GradCheck check_gradients(const intrarel::ParamList& params, const std::function<double()>& loss,
                                 const std::function<void()>& analytic, Stencil stencil = Stencil::kFourPoint,
                                 double floor = 1e-6) {
  intrarel::zero_grads(params);
  analytic();
  std::vector<Eigen::MatrixXd> grads;
  for (auto* p : params) grads.push_back(p->grad);
  GradCheck out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto* p = params[k];
    for (long i = 0; i < p->value.size(); ++i) {
      double& x = p->value.data()[i];
      const double orig = x;
      auto at = [&](double offset) {
        x = orig + offset;
        return loss();
      };
      double num = 0.0;
      if (stencil == Stencil::kTwoPoint) {
        const double h = 1e-5 * std::max(1.0, std::abs(orig));
        num = (at(h) - at(-h)) / (2.0 * h);
      } else {
        const double h = 1e-3 * std::max(1.0, std::abs(orig));
        num = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
      }
      x = orig;
      const double ana = grads[k].data()[i];
      const double err = std::abs(ana - num) / std::max({std::abs(ana), std::abs(num), floor});
      ++out.checked;
      if (err > out.worst) {
        out.worst = err;
        out.where = p->name + "[" + std::to_string(i) + "] analytic " + std::to_string(ana) + " numeric " +
                    std::to_string(num);
      }
    }
  }
  return out;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Plain-loop LSTM over columns of x, gates stacked input, forget, cell, output.
inline Eigen::MatrixXd reference_lstm(const Eigen::MatrixXd& W, const Eigen::MatrixXd& U, const Eigen::MatrixXd& b,
                                      const Eigen::MatrixXd& x, bool reverse) {
  const long H = U.cols(), D = W.cols(), n = x.cols();
  std::vector<double> h(static_cast<std::size_t>(H), 0.0), c(static_cast<std::size_t>(H), 0.0);
  Eigen::MatrixXd out(H, n);
  for (long step = 0; step < n; ++step) {
    const long t = reverse ? n - 1 - step : step;
    std::vector<double> z(static_cast<std::size_t>(4 * H));
    for (long r = 0; r < 4 * H; ++r) {
      double acc = b(r, 0);
      for (long d = 0; d < D; ++d) acc += W(r, d) * x(d, t);
      for (long k = 0; k < H; ++k) acc += U(r, k) * h[static_cast<std::size_t>(k)];
      z[static_cast<std::size_t>(r)] = acc;
    }
    for (long k = 0; k < H; ++k) {
      const auto K = static_cast<std::size_t>(k), HH = static_cast<std::size_t>(H);
      const double i = sigmoid(z[K]), f = sigmoid(z[HH + K]), g = std::tanh(z[2 * HH + K]),
                   o = sigmoid(z[3 * HH + K]);
      c[K] = f * c[K] + i * g;
      h[K] = o * std::tanh(c[K]);
      out(k, t) = h[K];
    }
  }
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
#ifdef INTRAREL_TEST_TMP
  std::filesystem::path base = INTRAREL_TEST_TMP;
#else
  std::filesystem::path base = std::filesystem::temp_directory_path() / "intrarel_tests";
#endif
  auto dir = base / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing

#endif  // INTRAREL_TESTS_SUPPORT_H_
