#include <doctest.h>

#include <fstream>
#include <sstream>

#include "intrarel/cli.h"
#include "intrarel/error.h"
#include "support.h"

using namespace intrarel;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "intrarel");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path write_config(const fs::path& dir, const std::string& name, const nlohmann::json& j) {
  auto p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json small_run(const fs::path& corpus) {
  return {{"corpus", corpus.string()},
          {"encoder", {{"emb_dim", 4}, {"hidden", 4}}},
          {"training", {{"max_epochs", 2}, {"learning_rate", 0.01}}}};
}

// Writes a fixture corpus into dir and returns its path.
fs::path make_corpus(const fs::path& dir, std::size_t n) {
  auto cfg = write_config(dir, "fixture.json", {{"fixture", {{"n_sentences", n}, {"vocab_size", 16}}}});
  REQUIRE(run({"fixture", "--config", cfg.string(), "--out", (dir / "fx").string()}) == 0);
  return dir / "fx" / "corpus.jsonl";
}

}  // namespace

TEST_CASE("run configuration parsing") {
  auto c = RunConfig::from_json({{"corpus", "x"}, {"split", "kfold-10"}, {"strategy", "baseline"}});
  CHECK(c.folds() == 10u);
  CHECK(c.strategy == Strategy::kMostFrequentBaseline);
  CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
  CHECK_THROWS_AS(RunConfig::from_json({{"corpuz", "x"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json({{"encoder", {{"hiden", 3}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json({{"training", {{"lr", 3}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json({{"split", "kfold-1"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json({{"split", "random"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json({{"seed", "abc"}}), ConfigError);
  auto lr0 = RunConfig::from_json({{"training", {{"learning_rate", 0.0}}}});
  CHECK_THROWS_AS(lr0.train_config(TrainTask::kTagger), ConfigError);
  auto ctx = RunConfig::from_json({{"encoder", {{"input_mode", "contextual-file"}}}, {"sense_training", {{"patience", 2}}}});
  CHECK(ctx.train_config(TrainTask::kTagger).learning_rate == 5e-5);
  CHECK(ctx.train_config(TrainTask::kSense).max_grad_norm == 0.5);
  CHECK(ctx.train_config(TrainTask::kSense).patience == 2);
  CHECK(ctx.train_config(TrainTask::kTagger).patience == 5);
}

TEST_CASE("configuration errors exit with status 1") {
  auto dir = testing::temp_dir("cli_errors");
  auto corpus = make_corpus(dir, 20);
  auto unknown = write_config(dir, "unknown.json", {{"corpus", corpus.string()}, {"bogus", 1}});
  CHECK(run({"train", "--config", unknown.string(), "--out", (dir / "o1").string()}) == 1);
  auto j = small_run(corpus);
  j["training"]["learning_rate"] = 0.0;
  auto lr0 = write_config(dir, "lr0.json", j);
  CHECK(run({"train", "--config", lr0.string(), "--out", (dir / "o2").string()}) == 1);
  auto nodev = write_config(dir, "nodev.json", {{"train_corpus", corpus.string()}});
  CHECK(run({"train", "--config", nodev.string(), "--out", (dir / "o3").string()}) == 1);
  auto missing = write_config(dir, "missing.json", {{"corpus", (dir / "nope.jsonl").string()}});
  CHECK(run({"dataset", "--config", missing.string(), "--out", (dir / "o4").string()}) == 1);
  std::ofstream(dir / "bad.jsonl") << "{\"doc_id\": \"d\"\n";
  auto bad = write_config(dir, "bad.json", {{"corpus", (dir / "bad.jsonl").string()}});
  CHECK(run({"dataset", "--config", bad.string(), "--out", (dir / "o5").string()}) == 1);
  CHECK(run({"train", "--config", (dir / "absent.json").string()}) == 1);
  CHECK(run({"train"}) == 1);
  CHECK(run({"eval", "--config", write_config(dir, "ok.json", small_run(corpus)).string(), "--out",
             (dir / "o6").string()}) == 1);
  auto wrong = write_config(dir, "task.json", small_run(corpus));
  CHECK(run({"train", "--config", wrong.string(), "--task", "parser", "--out", (dir / "o7").string()}) == 1);
}

TEST_CASE("dataset and self-test evaluation") {
  auto dir = testing::temp_dir("cli_dataset");
  auto corpus = make_corpus(dir, 40);
  auto cfg = write_config(dir, "run.json", small_run(corpus));
  REQUIRE(run({"dataset", "--config", cfg.string(), "--out", (dir / "ds").string()}) == 0);
  CHECK(fs::exists(dir / "ds" / "d1.jsonl"));
  CHECK(fs::exists(dir / "ds" / "d2.jsonl"));
  CHECK(slurp(dir / "ds" / "stats.txt").find("%") != std::string::npos);
  REQUIRE(run({"eval", "--config", cfg.string(), "--self-test", "--slices", "all", "--out", (dir / "st").string()}) == 0);
  auto report = nlohmann::json::parse(slurp(dir / "st" / "self_test_tagger.json"));
  auto r = EvalReport::from_json(report);
  CHECK(r.exact->arg1.f1 == 100.0);
  CHECK(r.exact->arg2.f1 == 100.0);
  auto sense = EvalReport::from_json(nlohmann::json::parse(slurp(dir / "st" / "self_test_sense.json")));
  CHECK(sense.sense->accuracy == 100.0);
  CHECK(fs::exists(dir / "st" / "config.json"));
}

TEST_CASE("train, evaluate and parse end to end") {
  auto dir = testing::temp_dir("cli_e2e");
  auto corpus = make_corpus(dir, 40);
  auto cfg = write_config(dir, "run.json", small_run(corpus));
  REQUIRE(run({"train", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  REQUIRE(run({"train", "--config", cfg.string(), "--task", "sense", "--out", (dir / "a").string()}) == 0);
  REQUIRE(run({"train", "--config", cfg.string(), "--out", (dir / "b").string()}) == 0);
  CHECK(slurp(dir / "a" / "tagger.ckpt") == slurp(dir / "b" / "tagger.ckpt"));
  CHECK(fs::exists(dir / "a" / "tagger_log.jsonl"));
  CHECK(fs::exists(dir / "a" / "sense_loss.csv"));

  REQUIRE(run({"train", "--config", cfg.string(), "--seed", "99", "--out", (dir / "c").string()}) == 0);
  CHECK(slurp(dir / "a" / "tagger.ckpt") != slurp(dir / "c" / "tagger.ckpt"));

  auto t = (dir / "a" / "tagger.ckpt").string(), s = (dir / "a" / "sense.ckpt").string();
  REQUIRE(run({"eval", "--config", cfg.string(), "--checkpoint", t, "--checkpoint", s, "--out", (dir / "e").string()}) == 0);
  for (auto name : {"eval_tagger.json", "eval_sense.json", "eval_pipeline_gold_args.json",
                    "eval_pipeline_predicted_args.json", "eval_pipeline_keys.json", "confusion.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / "e" / name), name);
  }
  REQUIRE(run({"parse", "--config", cfg.string(), "--checkpoint", t, "--checkpoint", s, "--out", (dir / "p").string()}) == 0);
  auto lines = slurp(dir / "p" / "parses.jsonl");
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 40);
  CHECK(run({"eval", "--config", cfg.string(), "--checkpoint", (dir / "none.ckpt").string(), "--out",
             (dir / "f").string()}) == 1);
}

TEST_CASE("cross-validation writes one report per fold") {
  auto dir = testing::temp_dir("cli_crossval");
  auto corpus = make_corpus(dir, 30);
  auto j = small_run(corpus);
  j["split"] = "kfold-3";
  j["training"]["max_epochs"] = 1;
  auto cfg = write_config(dir, "cv.json", j);
  REQUIRE(run({"crossval", "--config", cfg.string(), "--out", (dir / "cv").string()}) == 0);
  for (int i = 1; i <= 3; ++i) CHECK(fs::exists(dir / "cv" / ("fold_" + std::to_string(i) + ".json")));
  auto summary = nlohmann::json::parse(slurp(dir / "cv" / "crossval.json"));
  CHECK(summary["folds"] == 3);
}
