#ifndef INTRAREL_TAGGER_H_
#define INTRAREL_TAGGER_H_

#include <filesystem>
#include <memory>
#include <vector>

#include "intrarel/contextual.h"
#include "intrarel/corpus.h"
#include "intrarel/crf.h"
#include "intrarel/encoder.h"
#include "intrarel/trainer.h"

namespace intrarel {

struct TaggerOptions {
  EncoderConfig encoder;
  // Adds kMaskedScore to BIO-invalid cells in the training objective too.
  bool constrained_training = false;
};

// Encoder, linear projection to per-label emission scores, and a CRF.
class TaggerModel {
 public:
  TaggerModel() = default;

  // Builds vocabularies from `train` and initializes every weight from `seed`.
  // Contextual mode reads token vectors from `context` instead of an embedding.
  static TaggerModel create(const std::vector<D1Example>& train, const TaggerOptions& opts,
                            std::uint64_t seed,
                            std::shared_ptr<const ContextualVectors> context = nullptr);

  const TaggerOptions& options() const { return opts_; }
  bool uses_parse() const { return opts_.encoder.parse_features; }

  Emissions emissions(const AnnotatedSentence& s) const;
  CrfParams crf() const;

  // NLL of one example; accumulates its gradient into params().
  double loss_and_grad(const AnnotatedSentence& s, const TagSequence& gold);
  double loss(const AnnotatedSentence& s, const TagSequence& gold) const;

  // Constrained Viterbi decode; always BIO-valid.
  TagSequence tag(const AnnotatedSentence& s) const;

  ParamList params();

  void save(const std::filesystem::path& path) const;
  static TaggerModel load(const std::filesystem::path& path,
                          std::shared_ptr<const ContextualVectors> context = nullptr);

  void set_context(std::shared_ptr<const ContextualVectors> context) { context_ = std::move(context); }

  TokenEncoder encoder;
  Param proj_w;  // L x F
  Param proj_b;  // L x 1
  Param transitions;
  Param start;
  Param end;

 private:
  struct Forward {
    std::vector<std::size_t> ids;
    TokenEncoder::Cache cache;
    Eigen::MatrixXd features;
    Emissions emissions;
  };
  Forward run(const AnnotatedSentence& s, bool keep_cache) const;
  const ConstraintMask* training_mask() const;

  TaggerOptions opts_;
  ConstraintMask bio_;
  std::shared_ptr<const ContextualVectors> context_;
};

struct TaggerTraining {
  TaggerModel model;
  TrainLog log;
};

TaggerTraining train_tagger(const std::vector<D1Example>& train, const std::vector<D1Example>& dev,
                            const TaggerOptions& opts, const TrainConfig& cfg,
                            std::shared_ptr<const ContextualVectors> context = nullptr);

// Mean per-example NLL.
double mean_loss(const TaggerModel& model, const std::vector<D1Example>& examples);

}  // namespace intrarel

#endif  // INTRAREL_TAGGER_H_
