#ifndef INTRAREL_SENSE_H_
#define INTRAREL_SENSE_H_

#include <array>
#include <filesystem>
#include <memory>
#include <vector>

#include "intrarel/contextual.h"
#include "intrarel/corpus.h"
#include "intrarel/encoder.h"
#include "intrarel/sense_label.h"
#include "intrarel/trainer.h"

namespace intrarel {

inline constexpr const char* kClsToken = "[CLS]";
inline constexpr const char* kSepToken = "[SEP]";

// [CLS] arg1 [SEP] arg2 [SEP]. Throws ValidationError if either side is empty.
std::vector<std::string> build_pair_input(const std::vector<std::string>& arg1,
                                          const std::vector<std::string>& arg2);

// One argument pair as seen by the classifier. In contextual mode the two
// vector blocks hold one column per argument token.
struct PairInput {
  std::vector<std::string> arg1_tokens;
  std::vector<std::string> arg2_tokens;
  std::string parse;
  Eigen::MatrixXd arg1_vectors;
  Eigen::MatrixXd arg2_vectors;
};

PairInput make_pair_input(const D2Example& ex, const ContextualVectors* context = nullptr);
PairInput make_pair_input(const AnnotatedSentence& s, const std::vector<Span>& arg1,
                          const std::vector<Span>& arg2,
                          const ContextualVectors* context = nullptr);

struct SenseDistribution {
  std::array<double, kNumSenses> probs{};

  // Lowest index among the maxima.
  SenseLabel argmax() const;
  double max_probability() const;
};

struct SenseOptions {
  EncoderConfig encoder;
  // Inverse-frequency class weights in the cross-entropy.
  bool class_weighting = false;
};

// BiLSTM over the marker-joined pair; the state at the [CLS] position, with
// the parse vector appended when enabled, feeds a softmax over all senses.
class SenseModel {
 public:
  SenseModel() = default;

  static SenseModel create(const std::vector<D2Example>& train, const SenseOptions& opts,
                           std::uint64_t seed,
                           std::shared_ptr<const ContextualVectors> context = nullptr);

  const SenseOptions& options() const { return opts_; }
  bool uses_parse() const { return opts_.encoder.parse_features; }
  const ContextualVectors* context() const { return context_.get(); }
  void set_context(std::shared_ptr<const ContextualVectors> context) { context_ = std::move(context); }

  Eigen::VectorXd logits(const PairInput& in) const;
  SenseDistribution classify(const PairInput& in) const;
  SenseDistribution classify(const D2Example& ex) const;

  // Cross-entropy of one pair; accumulates its gradient into params().
  double loss_and_grad(const PairInput& in, SenseLabel gold);
  double loss(const PairInput& in, SenseLabel gold) const;

  ParamList params();

  void save(const std::filesystem::path& path) const;
  static SenseModel load(const std::filesystem::path& path,
                         std::shared_ptr<const ContextualVectors> context = nullptr);

  TokenEncoder encoder;
  Param markers;  // input_dim x 2 ([CLS], [SEP]); contextual mode only
  Param out_w;    // kNumSenses x F
  Param out_b;    // kNumSenses x 1
  std::array<double, kNumSenses> class_weights{};

 private:
  struct Forward {
    std::vector<std::size_t> ids;
    TokenEncoder::Cache cache;
    Eigen::MatrixXd features;
    Eigen::VectorXd logits;
    std::size_t arg1_len = 0;
  };
  Forward run(const PairInput& in, bool keep_cache) const;

  SenseOptions opts_;
  std::shared_ptr<const ContextualVectors> context_;
};

// Numerically stable softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

struct SenseTraining {
  SenseModel model;
  TrainLog log;
};

SenseTraining train_sense(const std::vector<D2Example>& train, const std::vector<D2Example>& dev,
                          const SenseOptions& opts, const TrainConfig& cfg,
                          std::shared_ptr<const ContextualVectors> context = nullptr);

double mean_loss(const SenseModel& model, const std::vector<D2Example>& examples);

}  // namespace intrarel

#endif  // INTRAREL_SENSE_H_
