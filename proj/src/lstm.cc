#include "intrarel/lstm.h"

#include <cmath>

namespace intrarel {
namespace {

Eigen::MatrixXd init_uniform(Eigen::Index rows, Eigen::Index cols, double bound, Rng* rng) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  if (!rng) return m;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(*rng, -bound, bound);
  }
  return m;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Lstm::Lstm(const std::string& name, std::size_t input_dim, std::size_t hidden, Rng* rng) {
  const auto H = static_cast<Eigen::Index>(hidden);
  const auto D = static_cast<Eigen::Index>(input_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  W = Param(name + ".W", init_uniform(4 * H, D, bound, rng));
  U = Param(name + ".U", init_uniform(4 * H, H, bound, rng));
  Eigen::MatrixXd bias = Eigen::MatrixXd::Zero(4 * H, 1);
  if (rng) bias.block(H, 0, H, 1).setOnes();
  b = Param(name + ".b", bias);
}

Eigen::MatrixXd Lstm::forward(const Eigen::MatrixXd& x, bool reverse, Cache* cache) const {
  const Eigen::Index H = U.value.cols();
  const Eigen::Index n = x.cols();
  Eigen::MatrixXd pre = W.value * x;
  pre.colwise() += b.value.col(0);

  Eigen::MatrixXd gates(4 * H, n), c(H, n), tanh_c(H, n), h(H, n);
  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(H);
  for (Eigen::Index step = 0; step < n; ++step) {
    const Eigen::Index t = reverse ? n - 1 - step : step;
    Eigen::VectorXd z = pre.col(t) + U.value * h_prev;
    for (Eigen::Index k = 0; k < H; ++k) {
      z(k) = sigmoid(z(k));                  // input
      z(H + k) = sigmoid(z(H + k));          // forget
      z(2 * H + k) = std::tanh(z(2 * H + k));  // cell candidate
      z(3 * H + k) = sigmoid(z(3 * H + k));  // output
    }
    Eigen::VectorXd ct = z.segment(H, H).cwiseProduct(c_prev) +
                         z.segment(0, H).cwiseProduct(z.segment(2 * H, H));
    Eigen::VectorXd tc = ct.array().tanh();
    Eigen::VectorXd ht = z.segment(3 * H, H).cwiseProduct(tc);
    gates.col(t) = z;
    c.col(t) = ct;
    tanh_c.col(t) = tc;
    h.col(t) = ht;
    h_prev = ht;
    c_prev = ct;
  }
  if (cache) {
    cache->x = x;
    cache->gates = std::move(gates);
    cache->c = std::move(c);
    cache->tanh_c = std::move(tanh_c);
    cache->h = h;
    cache->reverse = reverse;
  }
  return h;
}

Eigen::MatrixXd Lstm::backward(const Cache& cache, const Eigen::MatrixXd& dh) {
  const Eigen::Index H = U.value.cols();
  const Eigen::Index n = cache.x.cols();
  Eigen::MatrixXd dz(4 * H, n);
  Eigen::MatrixXd h_prev_all = Eigen::MatrixXd::Zero(H, n);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);

  for (Eigen::Index step = n - 1; step >= 0; --step) {
    const Eigen::Index t = cache.reverse ? n - 1 - step : step;
    const bool first = step == 0;
    const Eigen::Index tp = cache.reverse ? t + 1 : t - 1;  // previous position in time

    const auto g = cache.gates.col(t);
    const auto i_g = g.segment(0, H);
    const auto f_g = g.segment(H, H);
    const auto c_g = g.segment(2 * H, H);
    const auto o_g = g.segment(3 * H, H);

    Eigen::VectorXd c_prev = first ? Eigen::VectorXd::Zero(H) : Eigen::VectorXd(cache.c.col(tp));
    if (!first) h_prev_all.col(t) = cache.h.col(tp);

    Eigen::VectorXd dht = dh.col(t) + dh_next;
    Eigen::VectorXd tc = cache.tanh_c.col(t);
    Eigen::VectorXd d_o = dht.cwiseProduct(tc);
    Eigen::VectorXd dc =
        dht.cwiseProduct(o_g).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_next;
    Eigen::VectorXd d_i = dc.cwiseProduct(c_g);
    Eigen::VectorXd d_cand = dc.cwiseProduct(i_g);
    Eigen::VectorXd d_f = dc.cwiseProduct(c_prev);
    dc_next = dc.cwiseProduct(f_g);

    auto col = dz.col(t);
    col.segment(0, H) = d_i.array() * i_g.array() * (1.0 - i_g.array());
    col.segment(H, H) = d_f.array() * f_g.array() * (1.0 - f_g.array());
    col.segment(2 * H, H) = d_cand.array() * (1.0 - c_g.array().square());
    col.segment(3 * H, H) = d_o.array() * o_g.array() * (1.0 - o_g.array());
    dh_next = U.value.transpose() * col;
  }
  W.grad.noalias() += dz * cache.x.transpose();
  U.grad.noalias() += dz * h_prev_all.transpose();
  b.grad.col(0) += dz.rowwise().sum();
  return W.value.transpose() * dz;
}

BiLstm::BiLstm(const std::string& name, std::size_t input_dim, std::size_t hidden, Rng* rng)
    : fwd(name + ".fwd", input_dim, hidden, rng), bwd(name + ".bwd", input_dim, hidden, rng) {}

Eigen::MatrixXd BiLstm::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  const Eigen::Index H = static_cast<Eigen::Index>(hidden());
  Eigen::MatrixXd out(2 * H, x.cols());
  out.topRows(H) = fwd.forward(x, false, cache ? &cache->fwd : nullptr);
  out.bottomRows(H) = bwd.forward(x, true, cache ? &cache->bwd : nullptr);
  return out;
}

Eigen::MatrixXd BiLstm::backward(const Cache& cache, const Eigen::MatrixXd& dout) {
  const Eigen::Index H = static_cast<Eigen::Index>(hidden());
  Eigen::MatrixXd dx = fwd.backward(cache.fwd, dout.topRows(H));
  dx += bwd.backward(cache.bwd, dout.bottomRows(H));
  return dx;
}

ParamList BiLstm::params() {
  ParamList out = fwd.params();
  for (auto* p : bwd.params()) out.push_back(p);
  return out;
}

}  // namespace intrarel
