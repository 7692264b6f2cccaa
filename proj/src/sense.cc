#include "intrarel/sense.h"

#include <cmath>

#include "intrarel/error.h"

namespace intrarel {

using nlohmann::json;

namespace {

constexpr auto C = static_cast<Eigen::Index>(kNumSenses);

Eigen::MatrixXd gather(const Eigen::MatrixXd& sentence, const std::vector<Span>& spans) {
  std::size_t n = 0;
  for (const auto& s : spans) n += s.length();
  Eigen::MatrixXd out(sentence.rows(), static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (const auto& s : spans) {
    for (std::size_t t = s.start; t < s.end; ++t) {
      if (t >= static_cast<std::size_t>(sentence.cols())) {
        throw ValidationError("argument span exceeds the contextual vectors of its sentence");
      }
      out.col(col++) = sentence.col(static_cast<Eigen::Index>(t));
    }
  }
  return out;
}

std::vector<std::string> span_tokens(const std::vector<std::string>& tokens,
                                     const std::vector<Span>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) {
    for (std::size_t t = s.start; t < s.end; ++t) out.push_back(tokens.at(t));
  }
  return out;
}

void init_head(SenseModel& m, std::size_t width, std::size_t input_dim, bool contextual, Rng* rng) {
  const auto F = static_cast<Eigen::Index>(width);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(C, F);
  Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(contextual ? static_cast<Eigen::Index>(input_dim) : 0, 2);
  if (rng) {
    const double a = 1.0 / std::sqrt(static_cast<double>(width));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = uniform(*rng, -a, a);
    for (Eigen::Index i = 0; i < mk.size(); ++i) {
      mk.data()[i] = uniform(*rng, -kEmbeddingInitScale, kEmbeddingInitScale);
    }
  }
  m.out_w = Param("sense.out_w", w);
  m.out_b = Param("sense.out_b", Eigen::MatrixXd::Zero(C, 1));
  m.markers = Param("sense.markers", mk);
}

}  // namespace

std::vector<std::string> build_pair_input(const std::vector<std::string>& arg1,
                                          const std::vector<std::string>& arg2) {
  if (arg1.empty() || arg2.empty()) throw ValidationError("argument token lists must be non-empty");
  std::vector<std::string> out;
  out.reserve(arg1.size() + arg2.size() + 3);
  out.push_back(kClsToken);
  out.insert(out.end(), arg1.begin(), arg1.end());
  out.push_back(kSepToken);
  out.insert(out.end(), arg2.begin(), arg2.end());
  out.push_back(kSepToken);
  return out;
}

PairInput make_pair_input(const D2Example& ex, const ContextualVectors* context) {
  PairInput in{ex.arg1_tokens, ex.arg2_tokens, ex.parse, {}, {}};
  if (context) {
    const auto& v = context->lookup(ex.doc_id, ex.sent_index);
    in.arg1_vectors = gather(v, ex.arg1_spans);
    in.arg2_vectors = gather(v, ex.arg2_spans);
  }
  return in;
}

PairInput make_pair_input(const AnnotatedSentence& s, const std::vector<Span>& arg1,
                          const std::vector<Span>& arg2, const ContextualVectors* context) {
  PairInput in{span_tokens(s.tokens, arg1), span_tokens(s.tokens, arg2), s.parse, {}, {}};
  if (context) {
    const auto& v = context->lookup(s);
    in.arg1_vectors = gather(v, arg1);
    in.arg2_vectors = gather(v, arg2);
  }
  return in;
}

SenseLabel SenseDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return sense_from_index(best);
}

double SenseDistribution::max_probability() const {
  return probs[sense_index(argmax())];
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

SenseModel SenseModel::create(const std::vector<D2Example>& train, const SenseOptions& opts,
                              std::uint64_t seed, std::shared_ptr<const ContextualVectors> context) {
  if (train.empty()) throw ValidationError("sense training set is empty");
  const auto& ec = opts.encoder;
  Rng rng(seed);
  SenseModel m;
  m.opts_ = opts;

  std::vector<std::vector<std::string>> sents;
  std::vector<std::string> parses;
  for (const auto& ex : train) {
    sents.push_back(ex.arg1_tokens);
    sents.push_back(ex.arg2_tokens);
    if (ec.parse_features) {
      if (ex.parse.empty()) throw ConfigError("parse features enabled but example " + ex.key() + " has no parse");
      parses.push_back(ex.parse);
    }
  }
  Vocabulary vocab = Vocabulary::build(sents, ec.vocab_cap, {kClsToken, kSepToken});
  std::optional<Vocabulary> parse_vocab;
  if (ec.parse_features) parse_vocab = build_parse_vocab(parses, ec.parse_mode);

  const bool contextual = ec.input_mode == InputMode::kContextual;
  std::size_t input_dim = ec.emb_dim;
  if (contextual) {
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
  init_head(m, m.encoder.output_dim(), input_dim, contextual, &rng);

  m.class_weights.fill(1.0);
  if (opts.class_weighting) {
    std::array<std::size_t, kNumSenses> counts{};
    for (const auto& ex : train) ++counts[sense_index(ex.sense)];
    std::size_t present = 0;
    for (auto c : counts) present += c > 0;
    for (std::size_t i = 0; i < kNumSenses; ++i) {
      if (counts[i] > 0) {
        m.class_weights[i] = static_cast<double>(train.size()) /
                             (static_cast<double>(present) * static_cast<double>(counts[i]));
      }
    }
  }
  return m;
}

SenseModel::Forward SenseModel::run(const PairInput& in, bool keep_cache) const {
  if (uses_parse() && in.parse.empty()) {
    throw ConfigError("sense model uses parse features but the pair has no parse");
  }
  Forward f;
  f.arg1_len = in.arg1_tokens.size();
  Eigen::MatrixXd x;
  if (encoder.uses_embedding()) {
    x = encoder.embed(build_pair_input(in.arg1_tokens, in.arg2_tokens), &f.ids);
  } else {
    const Eigen::Index n1 = in.arg1_vectors.cols(), n2 = in.arg2_vectors.cols();
    if (n1 == 0 || n2 == 0) throw ValidationError("argument vectors must be non-empty");
    if (static_cast<std::size_t>(n1) != in.arg1_tokens.size() ||
        static_cast<std::size_t>(n2) != in.arg2_tokens.size()) {
      throw ValidationError("argument vector count differs from token count");
    }
    x.resize(markers.value.rows(), n1 + n2 + 3);
    x.col(0) = markers.value.col(0);
    x.middleCols(1, n1) = in.arg1_vectors;
    x.col(n1 + 1) = markers.value.col(1);
    x.middleCols(n1 + 2, n2) = in.arg2_vectors;
    x.col(n1 + n2 + 2) = markers.value.col(1);
  }
  f.features = encoder.encode(x, in.parse, keep_cache ? &f.cache : nullptr);
  f.logits = out_w.value * f.features.col(0) + out_b.value.col(0);
  return f;
}

Eigen::VectorXd SenseModel::logits(const PairInput& in) const { return run(in, false).logits; }

SenseDistribution SenseModel::classify(const PairInput& in) const {
  Eigen::VectorXd p = softmax(logits(in));
  SenseDistribution d;
  for (std::size_t i = 0; i < kNumSenses; ++i) d.probs[i] = p(static_cast<Eigen::Index>(i));
  return d;
}

SenseDistribution SenseModel::classify(const D2Example& ex) const {
  return classify(make_pair_input(ex, context_.get()));
}

double SenseModel::loss(const PairInput& in, SenseLabel gold) const {
  Eigen::VectorXd z = logits(in);
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  const auto y = sense_index(gold);
  return class_weights[y] * (lse - z(static_cast<Eigen::Index>(y)));
}

double SenseModel::loss_and_grad(const PairInput& in, SenseLabel gold) {
  auto f = run(in, true);
  const auto y = static_cast<Eigen::Index>(sense_index(gold));
  const double w = class_weights[static_cast<std::size_t>(y)];
  const double m = f.logits.maxCoeff();
  const double lse = m + std::log((f.logits.array() - m).exp().sum());
  Eigen::VectorXd dlogits = softmax(f.logits);
  dlogits(y) -= 1.0;
  dlogits *= w;

  out_w.grad += dlogits * f.features.col(0).transpose();
  out_b.grad += dlogits;
  Eigen::MatrixXd dfeat = Eigen::MatrixXd::Zero(f.features.rows(), f.features.cols());
  dfeat.col(0) = out_w.value.transpose() * dlogits;
  Eigen::MatrixXd dx = encoder.backward(f.cache, dfeat);
  if (encoder.uses_embedding()) {
    encoder.backward_embedding(f.ids, dx);
  } else {
    const auto n1 = static_cast<Eigen::Index>(f.arg1_len);
    markers.grad.col(0) += dx.col(0);
    markers.grad.col(1) += dx.col(n1 + 1) + dx.col(dx.cols() - 1);
  }
  return w * (lse - f.logits(y));
}

ParamList SenseModel::params() {
  ParamList out = encoder.params();
  if (markers.value.size() > 0) out.push_back(&markers);
  out.push_back(&out_w);
  out.push_back(&out_b);
  return out;
}

void SenseModel::save(const std::filesystem::path& path) const {
  json meta = {{"encoder", encoder.meta_to_json()},
               {"class_weighting", opts_.class_weighting},
               {"class_weights", class_weights}};
  auto& self = const_cast<SenseModel&>(*this);
  write_checkpoint(path, "sense", meta, self.params());
}

SenseModel SenseModel::load(const std::filesystem::path& path,
                            std::shared_ptr<const ContextualVectors> context) {
  json j = read_checkpoint(path, "sense");
  const json& meta = j.at("meta");
  SenseModel m;
  m.encoder = TokenEncoder::from_meta_json(meta.at("encoder"));
  m.opts_.encoder = m.encoder.config();
  m.opts_.class_weighting = meta.at("class_weighting").get<bool>();
  m.class_weights = meta.at("class_weights").get<std::array<double, kNumSenses>>();
  const bool contextual = m.encoder.config().input_mode == InputMode::kContextual;
  if (contextual) {
    if (context && context->dim() != m.encoder.input_dim()) {
      throw ConfigError("contextual vector width differs from the sense model's input width");
    }
    m.context_ = std::move(context);
  }
  init_head(m, m.encoder.output_dim(), m.encoder.input_dim(), contextual, nullptr);
  tensors_from_json(j.at("tensors"), m.params());
  return m;
}

double mean_loss(const SenseModel& model, const std::vector<D2Example>& examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) {
    total += model.loss(make_pair_input(ex, model.context()), ex.sense);
  }
  return total / static_cast<double>(examples.size());
}

SenseTraining train_sense(const std::vector<D2Example>& train, const std::vector<D2Example>& dev,
                          const SenseOptions& opts, const TrainConfig& cfg,
                          std::shared_ptr<const ContextualVectors> context) {
  cfg.validate();
  if (train.empty()) throw ValidationError("sense training set is empty");
  if (dev.empty()) throw ValidationError("sense dev set is empty");
  SenseTraining out;
  out.model = SenseModel::create(train, opts, cfg.seed, std::move(context));
  SenseModel& m = out.model;
  std::vector<PairInput> inputs;
  inputs.reserve(train.size());
  for (const auto& ex : train) inputs.push_back(make_pair_input(ex, m.context()));
  TrainHooks hooks;
  hooks.params = m.params();
  hooks.loss_and_grad = [&](std::size_t i) { return m.loss_and_grad(inputs[i], train[i].sense); };
  hooks.dev_loss = [&] { return mean_loss(m, dev); };
  out.log = run_training(train.size(), cfg, hooks);
  return out;
}

}  // namespace intrarel
