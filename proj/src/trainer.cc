#include "intrarel/trainer.h"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "intrarel/error.h"
#include "intrarel/random.h"

namespace intrarel {

using nlohmann::json;

void TrainConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid training config: ") + what);
  };
  need(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be positive");
  need(batch_size > 0, "batch_size must be positive");
  need(max_grad_norm > 0.0, "max_grad_norm must be positive");
  need(beta1 >= 0.0 && beta1 < 1.0, "beta1 must lie in [0, 1)");
  need(beta2 >= 0.0 && beta2 < 1.0, "beta2 must lie in [0, 1)");
  need(eps > 0.0, "eps must be positive");
  need(patience >= 1, "patience must be at least 1");
  need(max_epochs >= 1, "max_epochs must be at least 1");
}

json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate}, {"batch_size", batch_size},
          {"max_grad_norm", max_grad_norm}, {"beta1", beta1},
          {"beta2", beta2},                 {"eps", eps},
          {"patience", patience},           {"max_epochs", max_epochs},
          {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.patience = j.value("patience", c.patience);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.seed = j.value("seed", c.seed);
  return c;
}

TrainConfig default_train_config(TrainTask task, bool contextual) {
  TrainConfig c;
  c.learning_rate = contextual ? 5e-5 : 1e-3;
  c.max_grad_norm = task == TrainTask::kSense ? 0.5 : 1.0;
  return c;
}

std::string TrainLog::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : epochs) {
    out << json{{"epoch", e.epoch},
                {"train_loss", e.train_loss},
                {"dev_loss", e.dev_loss},
                {"wall_time", e.wall_time}}
               .dump()
        << '\n';
  }
  return out.str();
}

TrainLog run_training(std::size_t n_train, const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  if (n_train == 0) throw ValidationError("training set is empty");
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);
  Adam adam({cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps});
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);

  TrainLog log;
  std::vector<Eigen::MatrixXd> best;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(order, rng);
    double total = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t lo = 0; lo < n_train; lo += cfg.batch_size, ++batch_no) {
      const std::size_t hi = std::min(n_train, lo + cfg.batch_size);
      zero_grads(hooks.params);
      double batch_loss = 0.0;
      for (std::size_t k = lo; k < hi; ++k) batch_loss += hooks.loss_and_grad(order[k]);
      const double scale = 1.0 / static_cast<double>(hi - lo);
      for (auto* p : hooks.params) p->grad *= scale;
      const double norm = clip_global_norm(hooks.params, cfg.max_grad_norm);
      if (!std::isfinite(batch_loss) || !std::isfinite(norm)) {
        std::ostringstream msg;
        msg << "non-finite training state at epoch " << epoch << ", batch " << batch_no
            << ": loss " << batch_loss * scale << ", gradient norm " << norm;
        throw NumericError(msg.str());
      }
      adam.step(hooks.params);
      total += batch_loss;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total / static_cast<double>(n_train);
    rec.dev_loss = hooks.dev_loss();
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!std::isfinite(rec.dev_loss)) {
      throw NumericError("non-finite dev loss at epoch " + std::to_string(epoch));
    }
    log.epochs.push_back(rec);

    if (best.empty() || rec.dev_loss < log.best_dev_loss) {
      log.best_dev_loss = rec.dev_loss;
      log.best_epoch = epoch;
      best = snapshot(hooks.params);
      stale = 0;
    } else if (++stale >= cfg.patience) {
      log.early_stopped = true;
      break;
    }
  }
  restore(hooks.params, best);
  return log;
}

}  // namespace intrarel
