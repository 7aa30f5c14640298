#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexblend/optimize.hpp"

namespace lexblend {

inline constexpr std::size_t kCandidateCount = 5;
inline constexpr std::size_t kFoldCount = 5;
inline constexpr std::size_t kDefaultHistory = 3;

// One sentence-completion question. Context words are in text order and
// tokenized with the corpus rules.
struct ChallengeItem {
  std::string id;
  std::vector<std::string> before;
  std::vector<std::string> after;
  std::array<std::string, kCandidateCount> candidates;
  std::size_t answer = 0;

  bool operator==(const ChallengeItem&) const = default;
};

// Canonical TSV: id, sentence with a `___` gap, five candidates, answer
// letter a-e. An optional header row starting with "id" and blank lines are
// skipped. Throws ParseError carrying the 1-based line number.
std::vector<ChallengeItem> parse_challenge(std::string_view text);
std::vector<ChallengeItem> load_challenge(const std::filesystem::path& path);
void write_challenge(std::ostream& out, std::span<const ChallengeItem> items);

// Converts the original question/answer file pair, where each question is
// five lines "<n><letter>) sentence with [candidate] ..." and the answer file
// holds the correct line per question.
std::vector<ChallengeItem> convert_msr(std::string_view questions, std::string_view answers);

struct FoldConfig {
  int config_id = 0;   // 1-based
  int test_group = 0;  // 1-based; equals config_id
  std::array<int, kFoldCount - 1> optimization_groups{};
  std::vector<std::size_t> test_items;
  std::vector<std::size_t> optimization_items;
};

// Seeded shuffle, then round-robin into five groups; config i tests on
// group i and optimizes on the other four.
std::vector<FoldConfig> make_folds(std::size_t item_count, std::uint64_t seed);

GapContext item_context(const ChallengeItem& item, const Vocabulary& vocab, std::size_t history);
std::vector<TrainStep> make_steps(std::span<const ChallengeItem> items,
                                  std::span<const std::size_t> selection, const Vocabulary& vocab,
                                  std::size_t history);

// Returns the candidate index the scorer picks for an item.
using Scorer = std::function<std::size_t(const ChallengeItem&)>;

double accuracy(std::span<const ChallengeItem> items, const Scorer& scorer);

// Fraction of items whose top-ranked candidate is the answer, using at most
// `history` words on each side of the gap.
double accuracy(std::span<const ChallengeItem> items, const Model& model, const ModelParams& params,
                std::size_t history, std::optional<double> alpha_override = std::nullopt);

std::vector<ChallengeItem> select(std::span<const ChallengeItem> items,
                                  std::span<const std::size_t> indices);

struct OptimizeSettings {
  std::size_t history = kDefaultHistory;
  std::size_t epochs = kDefaultEpochs;
  double eta_alpha = kDefaultEtaAlpha;
  double eta_lambda = kDefaultEtaLambda;
  std::uint64_t seed = 1;
};

struct ConfigRun {
  int config_id = 0;
  ModelParams initial;
  ModelParams optimized;
  OptTrace trace;
  double initial_accuracy = 0.0;    // test group, random parameters
  double optimized_accuracy = 0.0;  // test group, optimized parameters
};

// Random initialization seeded by settings.seed + config_id, optimization on
// the config's four optimization groups, accuracy on its test group.
ConfigRun run_config(const Model& model, std::span<const ChallengeItem> items, const FoldConfig& fold,
                     const OptimizeSettings& settings);

struct SweepRow {
  std::size_t history = 0;
  double bayes_only = 0.0;  // alpha = 1
  double lsa_only = 0.0;    // alpha = 0
  double hybrid = 0.0;      // optimized alpha
  double alpha = 0.0;
};

// For every history length in [from, to], optimizes on the fold and
// reports test accuracy at alpha = 1, alpha = 0 and the optimized alpha
// (all with the optimized lambdas).
std::vector<SweepRow> history_sweep(const Model& model, std::span<const ChallengeItem> items,
                                    const FoldConfig& fold, OptimizeSettings settings,
                                    std::size_t from = 2, std::size_t to = 15);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct LambdaRow {
  char side = 'b';  // 'b' before the gap, 'a' after
  std::size_t distance = 0;
  double weight = 0.0;  // lambda; for distance 0 the reciprocal product
};

std::vector<LambdaRow> lambda_profile(const ModelParams& params);
void write_lambda_csv(std::ostream& out, std::span<const LambdaRow> rows);
// Rebuilds the lambda vectors (distance-0 rows are derived and ignored).
ModelParams read_lambda_csv(std::istream& in);

}  // namespace lexblend
