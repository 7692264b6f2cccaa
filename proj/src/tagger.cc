#include "intrarel/tagger.h"

#include <cmath>
#include <set>

#include "intrarel/error.h"

namespace intrarel {

using nlohmann::json;

namespace {

constexpr auto L = static_cast<Eigen::Index>(kNumLabels);

std::vector<std::vector<std::string>> unique_sentences(const std::vector<D1Example>& examples) {
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> out;
  for (const auto& ex : examples) {
    if (seen.insert(ex.sentence.key()).second) out.push_back(ex.sentence.tokens);
  }
  return out;
}

std::vector<std::string> unique_parses(const std::vector<D1Example>& examples) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& ex : examples) {
    if (seen.insert(ex.sentence.key()).second) out.push_back(ex.sentence.parse);
  }
  return out;
}

void init_params(TaggerModel& m, std::size_t width, Rng* rng) {
  const auto F = static_cast<Eigen::Index>(width);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(L, F);
  if (rng) {
    const double a = 1.0 / std::sqrt(static_cast<double>(width));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = uniform(*rng, -a, a);
  }
  m.proj_w = Param("tagger.proj_w", w);
  m.proj_b = Param("tagger.proj_b", Eigen::MatrixXd::Zero(L, 1));
  m.transitions = Param("crf.transitions", Eigen::MatrixXd::Zero(L, L));
  m.start = Param("crf.start", Eigen::MatrixXd::Zero(L, 1));
  m.end = Param("crf.end", Eigen::MatrixXd::Zero(L, 1));
}

}  // namespace

TaggerModel TaggerModel::create(const std::vector<D1Example>& train, const TaggerOptions& opts,
                                std::uint64_t seed,
                                std::shared_ptr<const ContextualVectors> context) {
  if (train.empty()) throw ValidationError("tagger training set is empty");
  const auto& ec = opts.encoder;
  Rng rng(seed);
  TaggerModel m;
  m.opts_ = opts;
  m.bio_ = bio_mask();

  Vocabulary vocab = Vocabulary::build(unique_sentences(train), ec.vocab_cap);
  std::optional<Vocabulary> parse_vocab;
  if (ec.parse_features) {
    auto parses = unique_parses(train);
    for (const auto& p : parses) {
      if (p.empty()) throw ConfigError("parse features enabled but a training sentence has no parse");
    }
    parse_vocab = build_parse_vocab(parses, ec.parse_mode);
  }
  std::size_t input_dim = ec.emb_dim;
  if (ec.input_mode == InputMode::kContextual) {
    if (!context) throw ConfigError("contextual-file mode requires contextual vectors");
    input_dim = context->dim();
    m.context_ = std::move(context);
  }
  m.encoder = TokenEncoder(ec, std::move(vocab), std::move(parse_vocab), input_dim, &rng);
  if (ec.input_mode == InputMode::kPretrainedVectors) {
    if (ec.pretrained_path.empty()) throw ConfigError("pretrained-vectors mode needs pretrained_path");
    auto loaded = load_pretrained_vectors(ec.pretrained_path, m.encoder.vocab, ec.emb_dim, seed);
    m.encoder.embedding->table.value = loaded.embedding.table.value;
  }
  init_params(m, m.encoder.output_dim(), &rng);
  return m;
}

TaggerModel::Forward TaggerModel::run(const AnnotatedSentence& s, bool keep_cache) const {
  if (uses_parse() && !s.has_parse()) {
    throw ConfigError("tagger uses parse features but sentence " + s.key() + " has no parse");
  }
  Forward f;
  Eigen::MatrixXd x;
  if (encoder.uses_embedding()) {
    x = encoder.embed(s.tokens, &f.ids);
  } else {
    if (!context_) throw ConfigError("contextual-file model has no contextual vectors attached");
    x = context_->lookup(s);
  }
  f.features = encoder.encode(x, s.parse, keep_cache ? &f.cache : nullptr);
  Eigen::MatrixXd logits = proj_w.value * f.features;
  logits.colwise() += proj_b.value.col(0);
  f.emissions = logits.transpose();
  return f;
}

const ConstraintMask* TaggerModel::training_mask() const {
  return opts_.constrained_training ? &bio_ : nullptr;
}

Emissions TaggerModel::emissions(const AnnotatedSentence& s) const { return run(s, false).emissions; }

CrfParams TaggerModel::crf() const {
  return {transitions.value, start.value.col(0), end.value.col(0)};
}

double TaggerModel::loss(const AnnotatedSentence& s, const TagSequence& gold) const {
  auto f = run(s, false);
  auto c = crf();
  return log_partition(c, f.emissions, training_mask()) -
         score_sequence(c, f.emissions, gold);
}

double TaggerModel::loss_and_grad(const AnnotatedSentence& s, const TagSequence& gold) {
  auto f = run(s, true);
  auto r = nll(crf(), f.emissions, gold, training_mask());
  transitions.grad += r.grad.transitions;
  start.grad += r.grad.start;
  end.grad += r.grad.end;
  Eigen::MatrixXd dlogits = r.grad.emissions.transpose();  // L x n
  proj_w.grad += dlogits * f.features.transpose();
  proj_b.grad += dlogits.rowwise().sum();
  Eigen::MatrixXd dfeat = proj_w.value.transpose() * dlogits;
  Eigen::MatrixXd dx = encoder.backward(f.cache, dfeat);
  encoder.backward_embedding(f.ids, dx);
  return r.loss;
}

TagSequence TaggerModel::tag(const AnnotatedSentence& s) const {
  return viterbi_decode(crf(), emissions(s), bio_).tags;
}

ParamList TaggerModel::params() {
  ParamList out = encoder.params();
  for (auto* p : {&proj_w, &proj_b, &transitions, &start, &end}) out.push_back(p);
  return out;
}

void TaggerModel::save(const std::filesystem::path& path) const {
  json meta = {{"encoder", encoder.meta_to_json()},
               {"constrained_training", opts_.constrained_training}};
  auto& self = const_cast<TaggerModel&>(*this);
  write_checkpoint(path, "tagger", meta, self.params());
}

TaggerModel TaggerModel::load(const std::filesystem::path& path,
                              std::shared_ptr<const ContextualVectors> context) {
  json j = read_checkpoint(path, "tagger");
  const json& meta = j.at("meta");
  TaggerModel m;
  m.encoder = TokenEncoder::from_meta_json(meta.at("encoder"));
  m.opts_.encoder = m.encoder.config();
  m.opts_.constrained_training = meta.at("constrained_training").get<bool>();
  m.bio_ = bio_mask();
  if (m.encoder.config().input_mode == InputMode::kContextual) {
    if (context && context->dim() != m.encoder.input_dim()) {
      throw ConfigError("contextual vector width differs from the tagger's input width");
    }
    m.context_ = std::move(context);
  }
  init_params(m, m.encoder.output_dim(), nullptr);
  tensors_from_json(j.at("tensors"), m.params());
  return m;
}

double mean_loss(const TaggerModel& model, const std::vector<D1Example>& examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) total += model.loss(ex.sentence, ex.tags);
  return total / static_cast<double>(examples.size());
}

TaggerTraining train_tagger(const std::vector<D1Example>& train, const std::vector<D1Example>& dev,
                            const TaggerOptions& opts, const TrainConfig& cfg,
                            std::shared_ptr<const ContextualVectors> context) {
  cfg.validate();
  if (train.empty()) throw ValidationError("tagger training set is empty");
  if (dev.empty()) throw ValidationError("tagger dev set is empty");
  TaggerTraining out;
  out.model = TaggerModel::create(train, opts, cfg.seed, std::move(context));
  TaggerModel& m = out.model;
  TrainHooks hooks;
  hooks.params = m.params();
  hooks.loss_and_grad = [&](std::size_t i) { return m.loss_and_grad(train[i].sentence, train[i].tags); };
  hooks.dev_loss = [&] { return mean_loss(m, dev); };
  out.log = run_training(train.size(), cfg, hooks);
  return out;
}

}  // namespace intrarel
