#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lexblend/model.hpp"

namespace lexblend {

inline constexpr double kLambdaMin = 0.05;
inline constexpr double kLambdaMax = 20.0;

// Words around one gap. `before` and `after` are nearest-first: before[0]
// sits directly left of the gap, after[0] directly right.
struct GapContext {
  std::vector<WordId> before;
  std::vector<WordId> after;
  std::vector<WordId> candidates;
};

// Builds a context from text-order word lists, keeping at most `history`
// words on each side.
GapContext make_context(std::span<const WordId> before_in_text_order,
                        std::span<const WordId> after_in_text_order,
                        std::vector<WordId> candidates, std::size_t history);

// Blend weight plus per-distance exponents. lambda_before[x - 1] weights the
// before-gap word at distance x (x >= 1); distance 0 takes the reciprocal of
// the product of that side's lambdas. Same layout for lambda_after.
struct ModelParams {
  double alpha = 0.5;
  std::vector<double> lambda_before;
  std::vector<double> lambda_after;
  double eta_alpha = 0.1;
  double eta_lambda = 0.05;

  std::size_t history() const noexcept { return lambda_before.size() + 1; }

  // alpha = 0.5, every lambda = 1 (plain Naive Bayes product).
  static ModelParams neutral(std::size_t history);
  // alpha and every lambda drawn uniformly from (0, 1), then clamped.
  static ModelParams random(std::size_t history, std::uint64_t seed);

  void clamp();
  bool operator==(const ModelParams&) const = default;
};

struct ScoredCandidate {
  std::size_t index = 0;  // position in GapContext::candidates
  WordId word = kNoWord;
  double bayes = 0.0;     // equalized Naive Bayes score B_j
  double lsa = 0.0;       // equalized semantic score L_j
  double theta = 0.0;     // alpha * B_j + (1 - alpha) * L_j
};

enum class TiePolicy {
  Positional,  // equal values ranked by list order, earlier gets the lower rank
  Average,     // equal values share the mean of their ranks
};

// Divides by the sum; an all-zero input gives the uniform distribution.
std::vector<double> normalize_over_candidates(std::span<const double> scores);

// exp-normalizes log scores (shift by the max first).
std::vector<double> normalize_log_scores(std::span<const double> log_scores);

// Relative gap under which two scores count as equal when equalizing B and
// L. The log-space product can leave equal scores a few ulps apart.
inline constexpr double kScoreTieTolerance = 1e-12;

// Replaces each value by its 1-based ascending rank over k(k+1)/2. With
// Average ties, neighbours within `tie_tolerance` (relative) form one group.
std::vector<double> rank_equalize(std::span<const double> probs,
                                  TiePolicy ties = TiePolicy::Positional,
                                  double tie_tolerance = 0.0);

std::vector<double> hybrid_score(std::span<const double> bayes, std::span<const double> lsa,
                                 double alpha);

struct SideExponents {
  std::vector<double> before;  // exponent per before-distance
  std::vector<double> after;
};

// Exponents for contexts holding `before_len` / `after_len` words.
// Throws std::invalid_argument when params hold too few lambdas.
SideExponents exponents(const ModelParams& params, std::size_t before_len, std::size_t after_len);

// log( prior * prod_d before_terms[d]^e_d * prod_d after_terms[d]^e'_d ).
double log_weighted_product(double prior, std::span<const double> before_terms,
                            std::span<const double> after_terms, const SideExponents& exps);

// Unnormalized lambda-weighted bidirectional Naive Bayes score of candidate
// `j` using smoothed (not equalized) conditionals. Unknown candidates score
// with epsilon for the prior and every conditional.
double bayes_raw_score(const CooccurrenceGraphSet& graphs, const Vocabulary& vocab,
                       const GapContext& ctx, const ModelParams& params, WordId j,
                       const SmoothingPolicy& smoothing);

// Parameter-independent evidence for one gap, computed once and reused by
// every scoring pass (inference and each optimization step).
struct GapFeatures {
  std::vector<double> prior;                    // per candidate
  std::vector<std::vector<double>> before;      // [distance][candidate], equalized
  std::vector<std::vector<double>> after;       // [distance][candidate], equalized
  std::vector<double> lsa_raw;                  // L_j before equalization, 0 without vector
  std::vector<double> lsa;                      // equalized L_j

  std::size_t candidates() const noexcept { return prior.size(); }
};

// Per-distance conditionals are rank-equalized across the candidate set
// (average ties) before any exponent is applied.
GapFeatures extract_features(const Model& model, const GapContext& ctx);

struct GapScores {
  std::vector<double> log_bayes;   // log of the weighted product per candidate
  std::vector<double> bayes_prob;  // normalized over candidates (divided by gamma)
  std::vector<double> bayes;       // equalized B_j
  std::vector<double> lsa;         // equalized L_j
  std::vector<double> theta;
};

GapScores score_gap(const GapFeatures& features, const ModelParams& params,
                    std::optional<double> alpha_override = std::nullopt);

// Candidate positions sorted by value descending; ties keep list order.
std::vector<std::size_t> rank_order(std::span<const double> values);

std::vector<ScoredCandidate> rank_scores(const GapContext& ctx, const GapScores& scores);

std::vector<ScoredCandidate> predict(const Model& model, const GapContext& ctx,
                                     const ModelParams& params,
                                     std::optional<double> alpha_override = std::nullopt);

// Stand-alone sub-model scorers: order by the normalized Naive Bayes
// probability, or by the raw semantic similarity. Scores within
// kScoreTieTolerance keep list order, as in the blend.
std::vector<std::size_t> bayes_only_ranking(const GapFeatures& features, const ModelParams& params);
std::vector<std::size_t> lsa_only_ranking(const GapFeatures& features);

}  // namespace lexblend
