#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <sys/wait.h>

#include "lexblend/commands.hpp"
#include "lexblend/errors.hpp"
#include "lexblend/persist.hpp"
#include "support.hpp"

using namespace lexblend;
using lexblend::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Corpus directory, model and a matching challenge file from the synthetic language.
struct Workspace {
  TempDir dir;
  std::filesystem::path corpus = dir / "corpus";
  std::filesystem::path model = dir / "model.lxb";
  std::filesystem::path challenge = dir / "challenge.tsv";

  explicit Workspace(std::size_t items = 200, std::uint64_t seed = 42) {
    lexblend::testing::SyntheticLanguage lang(seed);
    std::filesystem::create_directories(corpus);
    lexblend::testing::write_corpus_file(corpus / "a.txt", lang.corpus(25));
    lexblend::testing::write_corpus_file(corpus / "b.txt", lang.corpus(25));
    std::ofstream out(challenge);
    write_challenge(out, lang.challenge(items));
  }

  TrainReport train() {
    TrainOptions t{corpus, model, std::nullopt, {}};
    t.config.max_distance = 8;
    std::ostringstream log;
    return cmd_train(t, log);
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LEXBLEND_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("train on the two sentence corpus") {
  TempDir dir;
  std::filesystem::create_directories(dir / "c");
  write_text(dir / "c" / "fixture.txt", "The sky is blue. The blue is a color.");
  write_text(dir / "c" / "ignored.md", "not part of the corpus");
  TrainOptions opts{dir / "c", dir / "m.lxb", std::nullopt, {}};
  opts.config.min_nonstop = 1;
  std::ostringstream log;
  const TrainReport r = cmd_train(opts, log);
  CHECK(r.documents == 1);
  CHECK(r.sentences == 2);
  CHECK(r.tokens == 9);
  CHECK(r.vocabulary == 6);
  CHECK(log.str().find("fingerprint " + r.fingerprint) != std::string::npos);

  const Model m = load(dir / "m.lxb").model;
  const Model expected = lexblend::testing::fixture_model();
  CHECK(m.graphs == expected.graphs);
  CHECK(m.vocab == expected.vocab);
  const auto the = m.vocab.id("the"), is = m.vocab.id("is");
  CHECK(m.graphs.weight(1, the, is) == 2);
}

TEST_CASE("train errors") {
  TempDir dir;
  std::filesystem::create_directories(dir / "empty");
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_train({dir / "empty", dir / "m.lxb", std::nullopt, {}}, log), EmptyCorpus);
  CHECK_THROWS_AS(cmd_train({dir / "missing", dir / "m.lxb", std::nullopt, {}}, log), IoError);
  CHECK_FALSE(std::filesystem::exists(dir / "m.lxb"));
}

TEST_CASE("training is byte-reproducible") {
  Workspace ws;
  const auto first = ws.train();
  const std::string bytes = slurp(ws.model);
  const auto second = ws.train();
  CHECK(first.fingerprint == second.fingerprint);
  CHECK(slurp(ws.model) == bytes);
}

TEST_CASE("optimize with zero epochs") {
  Workspace ws;
  ws.train();
  const auto before = load(ws.model);
  OptimizeOptions opts;
  opts.model = ws.model;
  opts.challenge = ws.challenge;
  opts.config = 2;
  opts.settings.epochs = 0;
  opts.trace_dir = ws.dir / "trace";
  std::ostringstream log;
  const auto runs = cmd_optimize(opts, log);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].optimized == runs[0].initial);
  CHECK(runs[0].trace.steps.empty());
  const auto after = load(ws.model);
  CHECK(after.model == before.model);
  CHECK(after.params.for_config(2) == runs[0].initial);
  CHECK(after.params.base == before.params.base);
  // header only
  CHECK(slurp(ws.dir / "trace" / "config2_epochs.csv") == "epoch,error\n");
}

TEST_CASE("optimize then evaluate") {
  Workspace ws;
  ws.train();
  OptimizeOptions opts;
  opts.model = ws.model;
  opts.challenge = ws.challenge;
  opts.config = 1;
  opts.trace_dir = ws.dir / "trace";
  opts.promote = true;
  std::ostringstream log;
  const auto runs = cmd_optimize(opts, log);
  REQUIRE(runs.size() == 1);
  const auto stored = load(ws.model).params;
  CHECK(stored.for_config(1) == runs[0].optimized);
  CHECK(stored.base == runs[0].optimized);
  CHECK(std::filesystem::exists(ws.dir / "trace" / "config1_steps.csv"));

  EvalOptions ev;

  ev.model = ws.model;

  ev.challenge = ws.challenge;
  ev.config = 1;
  ev.seed = opts.settings.seed;
  std::ostringstream out;
  const auto rows = cmd_eval(ev, out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].optimized == runs[0].optimized_accuracy);
  CHECK(rows[0].non_optimized == runs[0].initial_accuracy);
  CHECK(rows[0].optimized >= rows[0].non_optimized);
  CHECK(out.str().rfind("config,optimized,non_optimized\n1,", 0) == 0);
  CHECK(out.str().find("\nmean,") != std::string::npos);

  ev.history = 4;
  CHECK_THROWS_AS(cmd_eval(ev, out), std::invalid_argument);
  ev.history.reset();
  ev.config = 6;
  CHECK_THROWS_AS(cmd_eval(ev, out), std::invalid_argument);

  std::ostringstream lambdas;
  cmd_lambdas(ws.model, 1, lambdas);
  CHECK(lambdas.str().rfind("side,distance,weight\n", 0) == 0);
}

TEST_CASE("evaluation with a model that knows none of the words") {
  Workspace ws(1040, 5);
  // train on unrelated text so every candidate is out of vocabulary
  std::filesystem::remove_all(ws.corpus);
  std::filesystem::create_directories(ws.corpus);
  write_text(ws.corpus / "other.txt", "Apples grow on trees in autumn orchards. Pears ripen slowly in cold cellars.");
  TrainOptions t{ws.corpus, ws.model, std::nullopt, {}};
  t.config.min_nonstop = 1;
  std::ostringstream log;
  cmd_train(t, log);
  EvalOptions ev;
  ev.model = ws.model;
  ev.challenge = ws.challenge;
  std::ostringstream out;
  const auto rows = cmd_eval(ev, out);
  REQUIRE(rows.size() == 5);
  double mean = 0.0;
  for (const auto& r : rows) mean += r.optimized / 5.0;
  CHECK(mean >= 0.16);
  CHECK(mean <= 0.24);
}

TEST_CASE("convert original question files") {
  TempDir dir;
  write_text(dir / "q.txt",
             "1a) He took the [train] home.\n1b) He took the [cat] home.\n1c) He took the [sky] home.\n"
             "1d) He took the [blue] home.\n1e) He took the [idea] home.\n");
  write_text(dir / "a.txt", "1a) He took the [train] home.\n");
  CHECK(cmd_convert_msr(dir / "q.txt", dir / "a.txt", dir / "out.tsv") == 1);
  const auto items = load_challenge(dir / "out.tsv");
  REQUIRE(items.size() == 1);
  CHECK(items[0].candidates[0] == "train");
  CHECK(items[0].answer == 0);
}

TEST_CASE("binary exit codes") {
  Workspace ws;
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") != 0);
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("train " + ws.corpus.string() + " -o " + ws.model.string() + " -D 8") == 0);
  CHECK(run_cli("eval " + ws.model.string() + " " + ws.challenge.string() + " --config 1") == 0);
  CHECK(run_cli("optimize " + ws.model.string() + " " + ws.challenge.string() + " --config 3 --epochs 1") == 0);
  CHECK(run_cli("lambdas " + ws.model.string() + " --config 3") == 0);

  std::filesystem::create_directories(ws.dir / "empty");
  CHECK(run_cli("train " + (ws.dir / "empty").string() + " -o " + (ws.dir / "x.lxb").string()) == 1);

  write_text(ws.dir / "junk.lxb", "LEXBLEND but not really");
  CHECK(run_cli("eval " + (ws.dir / "junk.lxb").string() + " " + ws.challenge.string()) == 1);
  write_text(ws.dir / "bad.tsv", "1\tno gap\ta\tb\tc\td\te\ta\n");
  CHECK(run_cli("eval " + ws.model.string() + " " + (ws.dir / "bad.tsv").string()) == 1);
  CHECK(run_cli("serve " + ws.model.string() + " --bind nonsense:port") == 1);
}
