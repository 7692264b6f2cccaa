#ifndef INTRAREL_TRAINER_H_
#define INTRAREL_TRAINER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intrarel/param.h"

namespace intrarel {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  double max_grad_norm = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t patience = 5;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 13;

  // Throws ConfigError unless every field is positive (betas in [0, 1)).
  void validate() const;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

enum class TrainTask { kTagger, kSense };

// Learning rate 1e-3 for trainable inputs and 5e-5 over contextual vectors;
// clipping norm 1.0 for the tagger and 0.5 for the sense classifier.
TrainConfig default_train_config(TrainTask task, bool contextual);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double wall_time = 0.0;  // seconds since training began
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_loss = 0.0;
  bool early_stopped = false;

  // One {"epoch", "train_loss", "dev_loss", "wall_time"} object per line.
  std::string to_jsonl() const;
};

struct TrainHooks {
  ParamList params;
  // Loss of training example i; accumulates its gradient into params.
  std::function<double(std::size_t)> loss_and_grad;
  // Mean loss over the dev set with current parameters.
  std::function<double()> dev_loss;
};

// Mini-batch Adam on the mean example loss with global-norm clipping.
// Examples are reshuffled every epoch from a generator seeded once. Training
// stops after `patience` epochs without dev improvement and the parameters of
// the best dev epoch are restored. Throws NumericError on a non-finite loss
// or gradient norm.
TrainLog run_training(std::size_t n_train, const TrainConfig& cfg, const TrainHooks& hooks);

}  // namespace intrarel

#endif  // INTRAREL_TRAINER_H_
