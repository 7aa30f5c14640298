#include "lexblend/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lexblend/errors.hpp"
#include "lexblend/persist.hpp"
#include "lexblend/service.hpp"

namespace lexblend {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::vector<const FoldConfig*> pick(const std::vector<FoldConfig>& folds, std::optional<int> config) {
  std::vector<const FoldConfig*> out;
  if (config && (*config < 1 || *config > static_cast<int>(folds.size())))
    throw std::invalid_argument("config must be between 1 and " + std::to_string(folds.size()));
  for (const auto& f : folds)
    if (!config || f.config_id == *config) out.push_back(&f);
  return out;
}

}  // namespace

TrainReport cmd_train(const TrainOptions& options, std::ostream& log) {
  const StopwordSet stopwords = load_stopwords(options.stopwords.value_or(default_stopword_path()));
  const auto docs = read_corpus_dir(options.corpus_dir, stopwords);
  std::vector<Sentence> sentences;
  for (const auto& d : docs) sentences.insert(sentences.end(), d.sentences.begin(), d.sentences.end());

  const Model model = train_model(sentences, options.config);
  save(model, ParamStore{}, options.output);

  TrainReport r;
  r.documents = docs.size();
  r.sentences = model.sentence_count;
  r.tokens = model.vocab.total_tokens();
  r.vocabulary = model.vocab.size();
  r.qualifying = model.qualifying_sentences;
  r.rank = model.srt.rank();
  r.fingerprint = model.fingerprint;
  log << "documents   " << r.documents << '\n'
      << "sentences   " << r.sentences << '\n'
      << "tokens      " << r.tokens << '\n'
      << "vocabulary  " << r.vocabulary << '\n'
      << "qualifying  " << r.qualifying << '\n'
      << "svd rank    " << r.rank << '\n'
      << "fingerprint " << r.fingerprint << '\n';
  return r;
}

std::vector<ConfigRun> cmd_optimize(const OptimizeOptions& options, std::ostream& log) {
  ModelBundle bundle = load(options.model);
  const auto items = load_challenge(options.challenge);
  const auto folds = make_folds(items.size(), options.fold_seed);

  std::vector<ConfigRun> runs;
  log << std::fixed << std::setprecision(4);
  for (const FoldConfig* fold : pick(folds, options.config)) {
    ConfigRun run = run_config(bundle.model, items, *fold, options.settings);
    bundle.params.configs[fold->config_id] = run.optimized;
    if (options.promote) bundle.params.base = run.optimized;
    if (options.trace_dir) {
      std::filesystem::create_directories(*options.trace_dir);
      const std::string stem = "config" + std::to_string(fold->config_id);
      auto steps = open_out(*options.trace_dir / (stem + "_steps.csv"));
      write_trace_csv(steps, run.trace);
      auto epochs = open_out(*options.trace_dir / (stem + "_epochs.csv"));
      write_epoch_csv(epochs, run.trace);
    }
    log << "config " << fold->config_id << "  alpha " << run.optimized.alpha << "  accuracy "
        << run.initial_accuracy << " -> " << run.optimized_accuracy << '\n';
    runs.push_back(std::move(run));
  }
  save(bundle.model, bundle.params, options.model);
  return runs;
}

std::vector<EvalRow> cmd_eval(const EvalOptions& options, std::ostream& out) {
  const ModelBundle bundle = load(options.model);
  const auto items = load_challenge(options.challenge);
  const auto folds = make_folds(items.size(), options.fold_seed);

  std::vector<EvalRow> rows;
  out << "config,optimized,non_optimized\n" << std::fixed << std::setprecision(4);
  double sum_opt = 0.0, sum_raw = 0.0;
  for (const FoldConfig* fold : pick(folds, options.config)) {
    const ModelParams& params = bundle.params.for_config(fold->config_id);
    const std::size_t history = options.history.value_or(params.history());
    if (history == 0 || history > params.history())
      throw std::invalid_argument("history exceeds the stored parameters (" + std::to_string(params.history()) + ")");
    const ModelParams initial =
        ModelParams::random(history, options.seed + static_cast<std::uint64_t>(fold->config_id));
    const auto test = select(items, fold->test_items);
    EvalRow row{fold->config_id, accuracy(test, bundle.model, params, history),
                accuracy(test, bundle.model, initial, history)};
    out << row.config_id << ',' << row.optimized << ',' << row.non_optimized << '\n';
    sum_opt += row.optimized;
    sum_raw += row.non_optimized;
    rows.push_back(row);
  }
  const double n = static_cast<double>(rows.size());
  out << "mean," << sum_opt / n << ',' << sum_raw / n << '\n';
  return rows;
}

std::vector<SweepRow> cmd_sweep(const SweepOptions& options, std::ostream& out) {
  const ModelBundle bundle = load(options.model);
  const auto items = load_challenge(options.challenge);
  const auto folds = make_folds(items.size(), options.fold_seed);
  const FoldConfig* fold = pick(folds, options.config).front();
  const auto rows = history_sweep(bundle.model, items, *fold, options.settings, options.from, options.to);
  write_sweep_csv(out, rows);
  return rows;
}

void cmd_lambdas(const std::filesystem::path& model, std::optional<int> config, std::ostream& out) {
  const ModelBundle bundle = load(model);
  const ModelParams& params = config ? bundle.params.for_config(*config) : bundle.params.base;
  write_lambda_csv(out, lambda_profile(params));
}

std::size_t cmd_convert_msr(const std::filesystem::path& questions, const std::filesystem::path& answers,
                            const std::filesystem::path& output) {
  const auto items = convert_msr(read_text(questions), read_text(answers));
  auto out = open_out(output);
  write_challenge(out, items);
  if (!out) throw IoError("cannot write " + output.string());
  return items.size();
}

void cmd_serve(const ServeOptions& options, std::ostream& log) {
  ModelBundle bundle = load(options.model);
  ModelParams params = options.config ? bundle.params.for_config(*options.config) : bundle.params.base;
  std::string bind = "127.0.0.1:8080";
  if (options.bind) {
    bind = *options.bind;
  } else if (const char* env = std::getenv("LEXBLEND_ADDR"); env && *env) {
    bind = env;
  }
  const BindAddress address = parse_bind_address(bind);
  const SuggestionService service(std::move(bundle.model), std::move(params));
  log << "listening on " << address.host << ':' << address.port << std::endl;
  serve(service, address, options.static_dir);
}

}  // namespace lexblend
