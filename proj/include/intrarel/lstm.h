#ifndef INTRAREL_LSTM_H_
#define INTRAREL_LSTM_H_

#include <string>

#include <Eigen/Dense>

#include "intrarel/param.h"
#include "intrarel/random.h"

namespace intrarel {

// Single-direction LSTM over the columns of an input matrix.
//
//   z = W x_t + U h_{t-1} + b,  gates stacked as [input; forget; cell; output]
//   c_t = f * c_{t-1} + i * g,   h_t = o * tanh(c_t)
//
// Initial hidden and cell states are zero.
class Lstm {
 public:
  Lstm() = default;
  // Weights ~ uniform(-1/sqrt(hidden), 1/sqrt(hidden)); forget-gate bias 1.
  // With rng == nullptr every parameter starts at zero.
  Lstm(const std::string& name, std::size_t input_dim, std::size_t hidden, Rng* rng);

  std::size_t input_dim() const { return static_cast<std::size_t>(W.value.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(U.value.cols()); }

  struct Cache {
    Eigen::MatrixXd x;       // D x n
    Eigen::MatrixXd gates;   // 4H x n, post-activation, indexed by position
    Eigen::MatrixXd c;       // H x n
    Eigen::MatrixXd tanh_c;  // H x n
    Eigen::MatrixXd h;       // H x n
    bool reverse = false;
  };

  // Column t of the result is the hidden state after consuming x_t. With
  // reverse = true the sequence is consumed right to left.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, bool reverse, Cache* cache) const;

  // dh holds dL/dh_t per column. Accumulates parameter gradients and returns
  // dL/dx.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dh);

  ParamList params() { return {&W, &U, &b}; }

  Param W;  // 4H x D
  Param U;  // 4H x H
  Param b;  // 4H x 1
};

// Forward and backward LSTMs with h_i = [fwd_i ; bwd_i].
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(const std::string& name, std::size_t input_dim, std::size_t hidden, Rng* rng);

  std::size_t hidden() const { return fwd.hidden(); }
  std::size_t output_dim() const { return 2 * fwd.hidden(); }

  struct Cache {
    Lstm::Cache fwd;
    Lstm::Cache bwd;
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache) const;
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dout);

  ParamList params();

  Lstm fwd;
  Lstm bwd;
};

}  // namespace intrarel

#endif  // INTRAREL_LSTM_H_
