#include "intrarel/cli.h"

#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "intrarel/contextual.h"
#include "intrarel/error.h"
#include "intrarel/eval.h"
#include "intrarel/sense.h"
#include "intrarel/tagger.h"

namespace intrarel {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTopKeys = {
    "corpus",         "train_corpus",       "dev_corpus",      "test_corpus",
    "input",          "contextual_vectors", "encoder",         "training",
    "sense_training", "split",              "split_unit",      "seed",
    "output_dir",     "skip_discontinuous", "constrained_training",
    "class_weighting", "sense_threshold",   "strategy",        "self_test",
    "fixture"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown configuration key '" + where + "." + k + "'");
  }
}

std::set<std::string> keys_of(const json& j) {
  std::set<std::string> out;
  for (const auto& [k, _] : j.items()) out.insert(k);
  return out;
}

json fixture_json(const FixtureParams& p) {
  return {{"n_sentences", p.n_sentences},       {"vocab_size", p.vocab_size},
          {"relation_rate", p.relation_rate},   {"multi_relation_rate", p.multi_relation_rate},
          {"altlex_rate", p.altlex_rate},       {"linked_rate", p.linked_rate},
          {"discontinuous_rate", p.discontinuous_rate}, {"arg2_first_rate", p.arg2_first_rate}};
}

json training_keys() {
  json j = TrainConfig{}.to_json();
  j.erase("seed");
  return j;
}

template <typename F>
auto with_file(const fs::path& path, F&& fn) -> decltype(fn()) {
  if (!fs::exists(path)) throw ValidationError("file not found: " + path.string());
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Corpus read_corpus_file(const std::string& path) {
  return with_file(path, [&] { return load_corpus(path); });
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string loss_curve_csv(const TrainLog& log) {
  std::ostringstream out;
  out << "epoch,train_loss,dev_loss\n";
  out.precision(17);
  for (const auto& e : log.epochs) out << e.epoch << ',' << e.train_loss << ',' << e.dev_loss << '\n';
  return out.str();
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> checkpoints;
  std::string slices;
  std::string task = "tagger";
  bool self_test = false;
};

class Runner {
 public:
  Runner(RunConfig cfg, Options opts) : cfg_(std::move(cfg)), opts_(std::move(opts)) {
    if (opts_.seed) cfg_.seed = *opts_.seed;
    if (!opts_.out.empty()) cfg_.output_dir = opts_.out;
    if (opts_.self_test) cfg_.self_test = true;
    if (opts_.task != "tagger" && opts_.task != "sense") {
      throw ConfigError("--task must be 'tagger' or 'sense'");
    }
    task_ = opts_.task == "sense" ? TrainTask::kSense : TrainTask::kTagger;
    d1_opts_.skip_discontinuous = cfg_.skip_discontinuous;
  }

  void fixture() {
    prepare_out();
    auto fx = generate_fixture(cfg_.seed, cfg_.fixture);
    save_corpus(out("corpus.jsonl"), fx.corpus);
    write_text(out("ledger.json"), ledger_to_json(fx.ledger) + "\n");
    std::cout << "wrote " << fx.corpus.size() << " sentences (" << fx.ledger.eligible_relations
              << " eligible relations) to " << out("corpus.jsonl").string() << "\n";
  }

  void dataset() {
    if (cfg_.corpus.empty()) throw ConfigError("dataset needs 'corpus'");
    Corpus corpus = read_corpus_file(cfg_.corpus);
    prepare_out();
    save_d1(out("d1.jsonl"), generate_d1(corpus, d1_opts_));
    save_d2(out("d2.jsonl"), generate_d2(corpus, d1_opts_));
    auto stats = corpus_stats(corpus, d1_opts_);
    auto text = format_stats(stats);
    write_text(out("stats.txt"), text);
    std::cout << text;
  }

  void train() {
    auto tc = cfg_.train_config(task_);
    Split split = load_split();
    auto ctx = load_context(split);
    prepare_out();
    if (task_ == TrainTask::kTagger) {
      auto result = fit_tagger(split, tc, ctx);
      result.model.save(out("tagger.ckpt"));
      write_log("tagger", result.log);
    } else {
      auto result = fit_sense(split, tc, ctx);
      result.model.save(out("sense.ckpt"));
      write_log("sense", result.log);
    }
  }

  void eval() {
    Split split = load_split();
    auto ctx = load_context(split);
    prepare_out();
    auto test_d1 = generate_d1(split.test, d1_opts_);
    auto test_d2 = generate_d2(split.test, d1_opts_);

    if (cfg_.self_test) {
      std::vector<TagSequence> gold;
      for (const auto& ex : test_d1) gold.push_back(ex.tags);
      emit("self_test_tagger", filter_slices(tagger_report(test_d1, gold, report_options())));
      std::vector<SenseLabel> labels;
      for (const auto& ex : test_d2) labels.push_back(ex.sense);
      emit("self_test_sense", sense_eval_report(test_d2, labels));
      return;
    }

    auto [tagger, sense] = load_models(ctx);
    if (!tagger && !sense) throw ConfigError("eval needs --checkpoint or the self-test flag");
    if (tagger) {
      emit("eval_tagger", filter_slices(tagger_report(test_d1, predict_tags(*tagger, test_d1), report_options())));
    }
    if (sense) {
      auto r = sense_eval_report(test_d2, predict_senses(*sense, test_d2));
      emit("eval_sense", r);
      write_text(out("confusion.csv"), confusion_csv(*r.sense));
    }
    if (tagger && sense) {
      auto p = evaluate_pipeline(*tagger, *sense, test_d1, cfg_.strategy);
      emit("eval_pipeline_gold_args", p.gold_arguments);
      emit("eval_pipeline_predicted_args", p.predicted_arguments);
      json keys = {{"kept", p.kept_keys}, {"dropped", p.dropped_keys}};
      write_text(out("eval_pipeline_keys.json"), keys.dump(2) + "\n");
      std::cout << "pipeline kept " << p.kept_keys.size() << " relations, dropped "
                << p.dropped_keys.size() << "\n";
    }
  }

  void crossval() {
    auto k = cfg_.folds();
    if (!k) throw ConfigError("crossval needs split 'kfold-<k>'");
    if (cfg_.corpus.empty()) throw ConfigError("crossval needs 'corpus'");
    auto tc = cfg_.train_config(task_);
    Corpus corpus = read_corpus_file(cfg_.corpus);
    auto folds = kfold(corpus, *k, cfg_.seed);
    if (folds.size() != *k) throw ValidationError("fold count differs from the configured k");
    auto ctx = load_context(Split{corpus, {}, {}});
    prepare_out();
    std::vector<EvalReport> reports;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      EvalReport r;
      if (task_ == TrainTask::kTagger) {
        auto fit = fit_tagger(folds[i], tc, ctx);
        auto test = generate_d1(folds[i].test, d1_opts_);
        r = tagger_report(test, predict_tags(fit.model, test), report_options());
      } else {
        auto fit = fit_sense(folds[i], tc, ctx);
        auto test = generate_d2(folds[i].test, d1_opts_);
        r = sense_eval_report(test, predict_senses(fit.model, test));
      }
      r.name = "fold " + std::to_string(i + 1);
      write_text(out("fold_" + std::to_string(i + 1) + ".json"), r.to_json().dump(2) + "\n");
      reports.push_back(std::move(r));
    }
    auto summary = crossval_aggregate(reports);
    write_text(out("crossval.json"), summary.to_json().dump(2) + "\n");
    auto text = format_crossval_table(summary);
    write_text(out("crossval.txt"), text);
    std::cout << text;
  }

  void parse() {
    std::string input = cfg_.input.empty() ? cfg_.corpus : cfg_.input;
    if (input.empty()) throw ConfigError("parse needs 'input' or 'corpus'");
    Corpus sentences = read_corpus_file(input);
    auto ctx = load_context(Split{sentences, {}, {}});
    auto [tagger, sense] = load_models(ctx);
    if (!tagger || !sense) throw ConfigError("parse needs a tagger and a sense checkpoint");
    check_compatible(*tagger, *sense);
    prepare_out();
    std::ostringstream lines;
    std::size_t found = 0;
    for (const auto& s : sentences) {
      auto p = parse_sentence(*tagger, *sense, s, cfg_.strategy);
      found += p.relation.has_value();
      lines << p.to_json().dump() << '\n';
    }
    write_text(out("parses.jsonl"), lines.str());
    std::cout << "parsed " << sentences.size() << " sentences, " << found << " relations\n";
  }

 private:
  fs::path out(const std::string& name) const { return fs::path(cfg_.output_dir) / name; }

  void prepare_out() {
    fs::create_directories(cfg_.output_dir);
    write_text(out("config.json"), cfg_.to_json().dump(2) + "\n");
  }

  Split load_split() const {
    if (!cfg_.train_corpus.empty()) {
      if (cfg_.dev_corpus.empty()) throw ConfigError("'train_corpus' requires 'dev_corpus'");
      Split s;
      s.train = read_corpus_file(cfg_.train_corpus);
      s.dev = read_corpus_file(cfg_.dev_corpus);
      if (!cfg_.test_corpus.empty()) s.test = read_corpus_file(cfg_.test_corpus);
      return s;
    }
    if (cfg_.corpus.empty()) throw ConfigError("configuration needs 'corpus' or 'train_corpus'");
    return split_random(read_corpus_file(cfg_.corpus), {0.6, 0.2, 0.2}, cfg_.seed, cfg_.split_unit);
  }

  std::shared_ptr<const ContextualVectors> load_context(const Split& split) const {
    if (cfg_.encoder.input_mode != InputMode::kContextual) return nullptr;
    if (cfg_.contextual_vectors.empty()) throw ConfigError("contextual-file mode needs 'contextual_vectors'");
    Corpus all = split.train;
    all.insert(all.end(), split.dev.begin(), split.dev.end());
    all.insert(all.end(), split.test.begin(), split.test.end());
    return std::make_shared<const ContextualVectors>(
        with_file(cfg_.contextual_vectors, [&] { return ContextualVectors::load(cfg_.contextual_vectors, all); }));
  }

  TaggerTraining fit_tagger(const Split& split, const TrainConfig& tc,
                            std::shared_ptr<const ContextualVectors> ctx) const {
    TaggerOptions to{cfg_.encoder, cfg_.constrained_training};
    return train_tagger(generate_d1(split.train, d1_opts_), generate_d1(split.dev, d1_opts_), to, tc, ctx);
  }

  SenseTraining fit_sense(const Split& split, const TrainConfig& tc,
                          std::shared_ptr<const ContextualVectors> ctx) const {
    SenseOptions so{cfg_.encoder, cfg_.class_weighting};
    return train_sense(generate_d2(split.train, d1_opts_), generate_d2(split.dev, d1_opts_), so, tc, ctx);
  }

  void write_log(const std::string& prefix, const TrainLog& log) {
    write_text(out(prefix + "_log.jsonl"), log.to_jsonl());
    write_text(out(prefix + "_loss.csv"), loss_curve_csv(log));
    std::cout << prefix << ": " << log.epochs.size() << " epochs, best dev loss "
              << log.best_dev_loss << " at epoch " << log.best_epoch << "\n";
  }

  std::pair<std::optional<TaggerModel>, std::optional<SenseModel>> load_models(
      std::shared_ptr<const ContextualVectors> ctx) const {
    std::optional<TaggerModel> tagger;
    std::optional<SenseModel> sense;
    for (const auto& path : opts_.checkpoints) {
      if (!fs::exists(path)) throw ValidationError("checkpoint not found: " + path);
      std::ifstream in(path);
      json head;
      try {
        in >> head;
      } catch (const json::exception&) {
        throw FormatError(path + ": not a checkpoint");
      }
      const auto kind = head.value("kind", "");
      if (kind == "tagger") {
        tagger = TaggerModel::load(path, ctx);
      } else if (kind == "sense") {
        sense = SenseModel::load(path, ctx);
      } else {
        throw FormatError(path + ": unknown checkpoint kind '" + kind + "'");
      }
    }
    return {std::move(tagger), std::move(sense)};
  }

  TaggerReportOptions report_options() const {
    return {!opts_.slices.empty(), cfg_.sense_threshold};
  }

  EvalReport filter_slices(EvalReport r) const {
    if (opts_.slices.empty() || opts_.slices == "all") return r;
    std::set<std::string> wanted;
    std::stringstream ss(opts_.slices);
    for (std::string item; std::getline(ss, item, ',');) {
      if (item != "multi-relation" && item != "multi-relation-left" && item != "multi-relation-right" &&
          item != "sense") {
        throw ConfigError("unknown slice '" + item + "'");
      }
      wanted.insert(item);
    }
    std::vector<SliceReport> kept;
    for (auto& s : r.slices) {
      bool is_sense = s.name.rfind("sense:", 0) == 0;
      if (wanted.count(is_sense ? "sense" : s.name)) kept.push_back(std::move(s));
    }
    r.slices = std::move(kept);
    return r;
  }

  void emit(const std::string& name, const EvalReport& r) {
    write_text(out(name + ".json"), r.to_json().dump(2) + "\n");
    auto text = format_report(r);
    write_text(out(name + ".txt"), text);
    std::cout << text << "\n";
  }

  RunConfig cfg_;
  Options opts_;
  TrainTask task_ = TrainTask::kTagger;
  D1Options d1_opts_;
};

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  reject_unknown(j, kTopKeys, "config");
  RunConfig c;
  try {
    c.corpus = j.value("corpus", c.corpus);
    c.train_corpus = j.value("train_corpus", c.train_corpus);
    c.dev_corpus = j.value("dev_corpus", c.dev_corpus);
    c.test_corpus = j.value("test_corpus", c.test_corpus);
    c.input = j.value("input", c.input);
    c.contextual_vectors = j.value("contextual_vectors", c.contextual_vectors);
    if (j.contains("encoder")) {
      json merged = EncoderConfig{}.to_json();
      reject_unknown(j.at("encoder"), keys_of(merged), "encoder");
      merged.update(j.at("encoder"));
      c.encoder = EncoderConfig::from_json(merged);
    }
    for (const char* key : {"training", "sense_training"}) {
      if (!j.contains(key)) continue;
      reject_unknown(j.at(key), keys_of(training_keys()), key);
      (std::string(key) == "training" ? c.training : c.sense_training) = j.at(key);
    }
    c.split = j.value("split", c.split);
    if (c.split != "random-60-20-20" && !c.folds()) {
      throw ConfigError("split must be 'random-60-20-20' or 'kfold-<k>'");
    }
    if (j.contains("split_unit")) {
      auto u = j.at("split_unit").get<std::string>();
      if (u != "sentence" && u != "document") throw ConfigError("split_unit must be 'sentence' or 'document'");
      c.split_unit = u == "document" ? SplitUnit::kDocument : SplitUnit::kSentence;
    }
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.skip_discontinuous = j.value("skip_discontinuous", c.skip_discontinuous);
    c.constrained_training = j.value("constrained_training", c.constrained_training);
    c.class_weighting = j.value("class_weighting", c.class_weighting);
    c.sense_threshold = j.value("sense_threshold", c.sense_threshold);
    if (j.contains("strategy")) {
      auto s = j.at("strategy").get<std::string>();
      if (s != "likelihood" && s != "baseline") throw ConfigError("strategy must be 'likelihood' or 'baseline'");
      c.strategy = s == "baseline" ? Strategy::kMostFrequentBaseline : Strategy::kLikelihood;
    }
    c.self_test = j.value("self_test", c.self_test);
    if (j.contains("fixture")) {
      const json& f = j.at("fixture");
      reject_unknown(f, keys_of(fixture_json(c.fixture)), "fixture");
      auto& p = c.fixture;
      p.n_sentences = f.value("n_sentences", p.n_sentences);
      p.vocab_size = f.value("vocab_size", p.vocab_size);
      p.relation_rate = f.value("relation_rate", p.relation_rate);
      p.multi_relation_rate = f.value("multi_relation_rate", p.multi_relation_rate);
      p.altlex_rate = f.value("altlex_rate", p.altlex_rate);
      p.linked_rate = f.value("linked_rate", p.linked_rate);
      p.discontinuous_rate = f.value("discontinuous_rate", p.discontinuous_rate);
      p.arg2_first_rate = f.value("arg2_first_rate", p.arg2_first_rate);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration value: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  auto resolved = [this](TrainTask task) {
    json j = train_config(task).to_json();
    j.erase("seed");
    return j;
  };
  return {{"corpus", corpus},
          {"train_corpus", train_corpus},
          {"dev_corpus", dev_corpus},
          {"test_corpus", test_corpus},
          {"input", input},
          {"contextual_vectors", contextual_vectors},
          {"encoder", encoder.to_json()},
          {"training", resolved(TrainTask::kTagger)},
          {"sense_training", resolved(TrainTask::kSense)},
          {"split", split},
          {"split_unit", split_unit == SplitUnit::kDocument ? "document" : "sentence"},
          {"seed", seed},
          {"output_dir", output_dir},
          {"skip_discontinuous", skip_discontinuous},
          {"constrained_training", constrained_training},
          {"class_weighting", class_weighting},
          {"sense_threshold", sense_threshold},
          {"strategy", strategy == Strategy::kLikelihood ? "likelihood" : "baseline"},
          {"self_test", self_test},
          {"fixture", fixture_json(fixture)}};
}

std::optional<std::size_t> RunConfig::folds() const {
  const std::string prefix = "kfold-";
  if (split.rfind(prefix, 0) != 0) return std::nullopt;
  try {
    std::size_t pos = 0;
    auto k = std::stoul(split.substr(prefix.size()), &pos);
    if (pos != split.size() - prefix.size() || k < 2) return std::nullopt;
    return k;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

TrainConfig RunConfig::train_config(TrainTask task) const {
  json merged = default_train_config(task, encoder.input_mode == InputMode::kContextual).to_json();
  merged.update(training);
  if (task == TrainTask::kSense) merged.update(sense_training);
  merged["seed"] = seed;
  TrainConfig c;
  try {
    c = TrainConfig::from_json(merged);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid training value: ") + e.what());
  }
  c.validate();
  return c;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Intra-sentential implicit discourse relation toolkit"};
  app.require_subcommand(1);
  Options opts;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"dataset", "Generate tagging and sense datasets with corpus statistics"},
      {"train", "Train the argument tagger or the sense classifier"},
      {"eval", "Evaluate checkpoints on the test split"},
      {"crossval", "Run k-fold cross-validation"},
      {"parse", "Run the end-to-end pipeline over input sentences"},
      {"fixture", "Write a synthetic corpus and its ledger"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "Run configuration (JSON)")->required();
    sub->add_option("--seed", opts.seed, "Override the configured seed");
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--checkpoint", opts.checkpoints, "Model checkpoint (repeatable)");
    sub->add_option("--slices", opts.slices, "Condition slices: all or a comma list");
    sub->add_option("--task", opts.task, "tagger or sense");
    sub->add_flag("--self-test", opts.self_test, "Score gold annotations as predictions");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Runner runner(RunConfig::load(opts.config), opts);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "dataset") runner.dataset();
    else if (cmd == "train") runner.train();
    else if (cmd == "eval") runner.eval();
    else if (cmd == "crossval") runner.crossval();
    else if (cmd == "parse") runner.parse();
    else runner.fixture();
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace intrarel
