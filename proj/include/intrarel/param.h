#ifndef INTRAREL_PARAM_H_
#define INTRAREL_PARAM_H_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace intrarel {

// A trainable tensor and its gradient accumulator.
struct Param {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  Param() = default;
  Param(std::string n, Eigen::MatrixXd v)
      : name(std::move(n)), value(std::move(v)), grad(Eigen::MatrixXd::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(); }
};

using ParamList = std::vector<Param*>;

void zero_grads(const ParamList& params);
double global_grad_norm(const ParamList& params);

// Scales all gradients by max_norm / norm when the global L2 norm exceeds
// max_norm. Returns the norm before clipping.
double clip_global_norm(const ParamList& params, double max_norm);

bool all_finite(const ParamList& params);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are matched to parameters by
// position, so step() must always see the same list.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}
  void step(const ParamList& params);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

// Tensors with shape headers: [{"name", "shape": [r, c], "data": [...]}].
nlohmann::json tensors_to_json(const ParamList& params);
// Fills params by name; throws FormatError on missing tensors or shape mismatch.
void tensors_from_json(const nlohmann::json& j, const ParamList& params);

// Self-describing model file:
// {"format": "intrarel-checkpoint", "kind", "meta", "tensors"}.
void write_checkpoint(const std::filesystem::path& path, const std::string& kind,
                      const nlohmann::json& meta, const ParamList& params);
// Returns the parsed file after checking format and kind (FormatError).
nlohmann::json read_checkpoint(const std::filesystem::path& path, const std::string& kind);

std::vector<Eigen::MatrixXd> snapshot(const ParamList& params);
void restore(const ParamList& params, const std::vector<Eigen::MatrixXd>& values);

}  // namespace intrarel

#endif  // INTRAREL_PARAM_H_
