#include <iostream>

#include <CLI11.hpp>

#include "lexblend/commands.hpp"
#include "lexblend/errors.hpp"

using namespace lexblend;

namespace {

void add_settings(CLI::App* app, OptimizeSettings& s) {
  app->add_option("--history", s.history, "Context words per side")->check(CLI::PositiveNumber);
  app->add_option("--epochs", s.epochs, "Passes over the optimization items");
  app->add_option("--eta-alpha", s.eta_alpha, "Learning rate for alpha");
  app->add_option("--eta-lambda", s.eta_lambda, "Learning rate for the lambdas");
  app->add_option("--seed", s.seed, "Seed for the random initial parameters");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid co-occurrence and semantic word prediction"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Train a model from a directory of .txt files");
  t->add_option("corpus", train.corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  t->add_option("-o,--output", train.output, "Model file to write")->required();
  t->add_option("--stopwords", train.stopwords, "Stopword list, one per line");
  t->add_option("-D,--max-distance", train.config.max_distance, "Number of distance graphs")
      ->check(CLI::PositiveNumber);
  t->add_option("--svd-rank", train.config.svd_rank, "Semantic rank (0 picks automatically)");
  t->add_option("--min-nonstop", train.config.min_nonstop, "Non-stopwords needed for a sentence column");
  t->add_option("--epsilon", train.config.epsilon, "Smoothing floor");
  t->add_option("--svd-seed", train.config.svd_seed, "Seed for the randomized SVD");

  OptimizeOptions opt;
  auto* o = app.add_subcommand("optimize", "Fit alpha and lambdas on fold configurations");
  o->add_option("model", opt.model, "Model file (updated in place)")->required()->check(CLI::ExistingFile);
  o->add_option("challenge", opt.challenge, "Challenge TSV")->required()->check(CLI::ExistingFile);
  o->add_option("--config", opt.config, "Fold configuration 1-5 (default: all)")->check(CLI::Range(1, 5));
  o->add_option("--fold-seed", opt.fold_seed, "Seed for the fold partition");
  o->add_option("--trace-dir", opt.trace_dir, "Directory for per-step and per-epoch CSV traces");
  o->add_flag("--promote", opt.promote, "Also store the result as the default parameters");
  add_settings(o, opt.settings);

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Accuracy on fold test groups");
  e->add_option("model", ev.model, "Model file")->required()->check(CLI::ExistingFile);
  e->add_option("challenge", ev.challenge, "Challenge TSV")->required()->check(CLI::ExistingFile);
  e->add_option("--config", ev.config, "Fold configuration 1-5 (default: all)")->check(CLI::Range(1, 5));
  e->add_option("--history", ev.history, "Context words per side")->check(CLI::PositiveNumber);
  e->add_option("--fold-seed", ev.fold_seed, "Seed for the fold partition");
  e->add_option("--seed", ev.seed, "Seed for the non-optimized parameters");

  SweepOptions sw;
  auto* s = app.add_subcommand("sweep", "Accuracy against history length");
  s->add_option("model", sw.model, "Model file")->required()->check(CLI::ExistingFile);
  s->add_option("challenge", sw.challenge, "Challenge TSV")->required()->check(CLI::ExistingFile);
  s->add_option("--config", sw.config, "Fold configuration 1-5")->check(CLI::Range(1, 5));
  s->add_option("--from", sw.from, "Shortest history")->check(CLI::PositiveNumber);
  s->add_option("--to", sw.to, "Longest history")->check(CLI::PositiveNumber);
  s->add_option("--fold-seed", sw.fold_seed, "Seed for the fold partition");
  add_settings(s, sw.settings);

  std::filesystem::path lambda_model;
  std::optional<int> lambda_config;
  auto* l = app.add_subcommand("lambdas", "Export per-distance weights as CSV");
  l->add_option("model", lambda_model, "Model file")->required()->check(CLI::ExistingFile);
  l->add_option("--config", lambda_config, "Fold configuration (default: base parameters)");

  std::filesystem::path questions, answers, converted;
  auto* c = app.add_subcommand("convert-msr", "Convert question/answer files to challenge TSV");
  c->add_option("questions", questions, "Questions file")->required()->check(CLI::ExistingFile);
  c->add_option("answers", answers, "Answers file")->required()->check(CLI::ExistingFile);
  c->add_option("-o,--output", converted, "TSV to write")->required();

  ServeOptions serve;
  auto* v = app.add_subcommand("serve", "Run the HTTP suggestion service");
  v->add_option("model", serve.model, "Model file")->required()->check(CLI::ExistingFile);
  v->add_option("--bind", serve.bind, "host:port (default: $LEXBLEND_ADDR or 127.0.0.1:8080)");
  v->add_option("--config", serve.config, "Use a fold configuration's parameters");
  v->add_option("--static", serve.static_dir, "Directory served under /")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*t) {
      cmd_train(train, std::cout);
    } else if (*o) {
      cmd_optimize(opt, std::cout);
    } else if (*e) {
      cmd_eval(ev, std::cout);
    } else if (*s) {
      cmd_sweep(sw, std::cout);
    } else if (*l) {
      cmd_lambdas(lambda_model, lambda_config, std::cout);
    } else if (*c) {
      std::cout << cmd_convert_msr(questions, answers, converted) << " items\n";
    } else if (*v) {
      cmd_serve(serve, std::cerr);
    }
  } catch (const std::exception& ex) {
    std::cerr << "lexblend: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
