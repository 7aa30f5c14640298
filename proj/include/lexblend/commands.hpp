#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lexblend/eval.hpp"
#include "lexblend/model.hpp"

namespace lexblend {

struct TrainOptions {
  std::filesystem::path corpus_dir;
  std::filesystem::path output;
  std::optional<std::filesystem::path> stopwords;  // default list when unset
  TrainConfig config;
};

struct TrainReport {
  std::size_t documents = 0;
  std::uint64_t sentences = 0;
  std::uint64_t tokens = 0;
  std::size_t vocabulary = 0;
  std::uint64_t qualifying = 0;
  std::size_t rank = 0;
  std::string fingerprint;
};

TrainReport cmd_train(const TrainOptions& options, std::ostream& log);

struct OptimizeOptions {
  std::filesystem::path model;
  std::filesystem::path challenge;
  std::optional<int> config;  // all five when unset
  OptimizeSettings settings;
  std::uint64_t fold_seed = 7;
  std::optional<std::filesystem::path> trace_dir;
  bool promote = false;  // also store the result as the default parameters
};

// Optimizes the selected configs and writes their parameters back into the
// model container. Returns the runs.
std::vector<ConfigRun> cmd_optimize(const OptimizeOptions& options, std::ostream& log);

struct EvalOptions {
  std::filesystem::path model;
  std::filesystem::path challenge;
  std::optional<int> config;
  std::optional<std::size_t> history;  // the stored parameters' history when unset
  std::uint64_t fold_seed = 7;
  std::uint64_t seed = 1;  // random initialization for the non-optimized column
};

struct EvalRow {
  int config_id = 0;
  double optimized = 0.0;
  double non_optimized = 0.0;
};

// Prints "config,optimized,non_optimized" rows followed by their mean.
std::vector<EvalRow> cmd_eval(const EvalOptions& options, std::ostream& out);

struct SweepOptions {
  std::filesystem::path model;
  std::filesystem::path challenge;
  int config = 1;
  std::size_t from = 2;
  std::size_t to = 15;
  OptimizeSettings settings;
  std::uint64_t fold_seed = 7;
};

std::vector<SweepRow> cmd_sweep(const SweepOptions& options, std::ostream& out);

void cmd_lambdas(const std::filesystem::path& model, std::optional<int> config, std::ostream& out);

std::size_t cmd_convert_msr(const std::filesystem::path& questions, const std::filesystem::path& answers,
                            const std::filesystem::path& output);

struct ServeOptions {
  std::filesystem::path model;
  std::optional<std::string> bind;  // LEXBLEND_ADDR, then 127.0.0.1:8080
  std::optional<int> config;
  std::optional<std::filesystem::path> static_dir;
};

void cmd_serve(const ServeOptions& options, std::ostream& log);

}  // namespace lexblend
