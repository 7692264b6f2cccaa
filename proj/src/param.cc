#include "intrarel/param.h"

#include <cmath>
#include <fstream>

#include "intrarel/error.h"

namespace intrarel {

void zero_grads(const ParamList& params) {
  for (auto* p : params) p->zero_grad();
}

double global_grad_norm(const ParamList& params) {
  double sq = 0.0;
  for (auto* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(const ParamList& params, double max_norm) {
  double norm = global_grad_norm(params);
  if (norm > max_norm && std::isfinite(norm)) {
    double scale = max_norm / norm;
    for (auto* p : params) p->grad *= scale;
  }
  return norm;
}

bool all_finite(const ParamList& params) {
  for (auto* p : params) {
    if (!p->value.allFinite()) return false;
  }
  return true;
}

void Adam::step(const ParamList& params) {
  if (m_.empty()) {
    for (auto* p : params) {
      m_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) throw ConfigError("Adam: parameter list changed between steps");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& g = params[i]->grad;
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    params[i]->value.array() -=
        cfg_.learning_rate * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + cfg_.eps);
  }
}

nlohmann::json tensors_to_json(const ParamList& params) {
  nlohmann::json out = nlohmann::json::array();
  for (auto* p : params) {
    std::vector<double> data(p->value.data(), p->value.data() + p->value.size());
    out.push_back({{"name", p->name},
                   {"shape", {p->value.rows(), p->value.cols()}},
                   {"data", data}});
  }
  return out;
}

void tensors_from_json(const nlohmann::json& j, const ParamList& params) {
  for (auto* p : params) {
    const nlohmann::json* found = nullptr;
    for (const auto& t : j) {
      if (t.at("name") == p->name) {
        found = &t;
        break;
      }
    }
    if (!found) throw FormatError("checkpoint is missing tensor '" + p->name + "'");
    auto rows = (*found).at("shape")[0].get<long>();
    auto cols = (*found).at("shape")[1].get<long>();
    if (rows != p->value.rows() || cols != p->value.cols()) {
      throw FormatError("tensor '" + p->name + "' has shape [" + std::to_string(rows) + ", " +
                        std::to_string(cols) + "], expected [" +
                        std::to_string(p->value.rows()) + ", " +
                        std::to_string(p->value.cols()) + "]");
    }
    auto data = (*found).at("data").get<std::vector<double>>();
    if (static_cast<long>(data.size()) != rows * cols) {
      throw FormatError("tensor '" + p->name + "' data length does not match its shape");
    }
    p->value = Eigen::Map<Eigen::MatrixXd>(data.data(), rows, cols);
    p->grad = Eigen::MatrixXd::Zero(rows, cols);
  }
}

void write_checkpoint(const std::filesystem::path& path, const std::string& kind,
                      const nlohmann::json& meta, const ParamList& params) {
  nlohmann::json j = {{"format", "intrarel-checkpoint"},
                      {"version", 1},
                      {"kind", kind},
                      {"meta", meta},
                      {"tensors", tensors_to_json(params)}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

nlohmann::json read_checkpoint(const std::filesystem::path& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": not a checkpoint: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "intrarel-checkpoint") {
    throw FormatError(path.string() + ": not a checkpoint");
  }
  if (j.value("kind", "") != kind) {
    throw FormatError(path.string() + ": checkpoint holds a " + j.value("kind", "?") +
                      " model, expected " + kind);
  }
  return j;
}

std::vector<Eigen::MatrixXd> snapshot(const ParamList& params) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(params.size());
  for (auto* p : params) out.push_back(p->value);
  return out;
}

void restore(const ParamList& params, const std::vector<Eigen::MatrixXd>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

}  // namespace intrarel
