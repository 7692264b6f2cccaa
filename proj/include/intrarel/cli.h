#ifndef INTRAREL_CLI_H_
#define INTRAREL_CLI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intrarel/corpus.h"
#include "intrarel/encoder.h"
#include "intrarel/fixture.h"
#include "intrarel/pipeline.h"
#include "intrarel/trainer.h"

namespace intrarel {

// Structured run configuration read from a JSON file. Unknown keys at any
// level raise ConfigError.
struct RunConfig {
  std::string corpus;
  std::string train_corpus;
  std::string dev_corpus;
  std::string test_corpus;
  std::string input;  // sentences for `parse`
  std::string contextual_vectors;
  EncoderConfig encoder;
  nlohmann::json training = nlohmann::json::object();
  nlohmann::json sense_training = nlohmann::json::object();
  std::string split = "random-60-20-20";  // or "kfold-<k>"
  SplitUnit split_unit = SplitUnit::kSentence;
  std::uint64_t seed = 13;
  std::string output_dir = "out";
  bool skip_discontinuous = true;
  bool constrained_training = false;
  bool class_weighting = false;
  std::size_t sense_threshold = 100;
  Strategy strategy = Strategy::kLikelihood;
  bool self_test = false;
  FixtureParams fixture;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Number of folds for "kfold-<k>", nullopt for the random split.
  std::optional<std::size_t> folds() const;
  TrainConfig train_config(TrainTask task) const;
};

// Entry point of the command-line tool. Returns the process exit code:
// 0 success, 1 validation or configuration error, 2 runtime or numeric error.
int run_cli(int argc, char** argv);

}  // namespace intrarel

#endif  // INTRAREL_CLI_H_
