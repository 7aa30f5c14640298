#include "lexblend/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lexblend {

GapContext make_context(std::span<const WordId> before_in_text_order,
                        std::span<const WordId> after_in_text_order,
                        std::vector<WordId> candidates, std::size_t history) {
  GapContext ctx;
  const std::size_t nb = std::min(history, before_in_text_order.size());
  for (std::size_t i = 0; i < nb; ++i)
    ctx.before.push_back(before_in_text_order[before_in_text_order.size() - 1 - i]);
  const std::size_t na = std::min(history, after_in_text_order.size());
  ctx.after.assign(after_in_text_order.begin(), after_in_text_order.begin() + static_cast<std::ptrdiff_t>(na));
  ctx.candidates = std::move(candidates);
  return ctx;
}

ModelParams ModelParams::neutral(std::size_t history) {
  if (history == 0) throw std::invalid_argument("history must be at least 1");
  ModelParams p;
  p.alpha = 0.5;
  p.lambda_before.assign(history - 1, 1.0);
  p.lambda_after.assign(history - 1, 1.0);
  return p;
}

ModelParams ModelParams::random(std::size_t history, std::uint64_t seed) {
  if (history == 0) throw std::invalid_argument("history must be at least 1");
  std::mt19937_64 rng(seed);
  // 53 random mantissa bits; identical across standard libraries
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  ModelParams p;
  p.alpha = unit();
  p.lambda_before.resize(history - 1);
  p.lambda_after.resize(history - 1);
  for (auto& l : p.lambda_before) l = unit();
  for (auto& l : p.lambda_after) l = unit();
  p.clamp();
  return p;
}

void ModelParams::clamp() {
  alpha = std::clamp(alpha, 0.0, 1.0);
  for (auto& l : lambda_before) l = std::clamp(l, kLambdaMin, kLambdaMax);
  for (auto& l : lambda_after) l = std::clamp(l, kLambdaMin, kLambdaMax);
}

std::vector<double> normalize_over_candidates(std::span<const double> scores) {
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  std::vector<double> out(scores.size());
  if (!(total > 0.0)) {
    std::fill(out.begin(), out.end(), scores.empty() ? 0.0 : 1.0 / static_cast<double>(scores.size()));
    return out;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] / total;
  return out;
}

std::vector<double> normalize_log_scores(std::span<const double> log_scores) {
  std::vector<double> out(log_scores.size());
  if (log_scores.empty()) return out;
  const double top = *std::max_element(log_scores.begin(), log_scores.end());
  if (!std::isfinite(top)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_scores[i] - top);
  return normalize_over_candidates(out);
}

std::vector<double> rank_equalize(std::span<const double> probs, TiePolicy ties, double tie_tolerance) {
  const std::size_t k = probs.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
  const double denom = static_cast<double>(k) * static_cast<double>(k + 1) / 2.0;
  std::vector<double> out(k);
  for (std::size_t pos = 0; pos < k;) {
    std::size_t end = pos + 1;
    if (ties == TiePolicy::Average)
      while (end < k && probs[order[end]] - probs[order[end - 1]] <=
                            tie_tolerance * std::max(std::abs(probs[order[end]]), std::abs(probs[order[end - 1]])))
        ++end;
    // ranks pos+1 .. end share their mean
    const double rank = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t i = pos; i < end; ++i) out[order[i]] = rank / denom;
    pos = end;
  }
  return out;
}

std::vector<double> hybrid_score(std::span<const double> bayes, std::span<const double> lsa,
                                 double alpha) {
  if (bayes.size() != lsa.size()) throw std::invalid_argument("score vectors differ in length");
  std::vector<double> out(bayes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * bayes[i] + (1.0 - alpha) * lsa[i];
  return out;
}

namespace {

std::vector<double> side_exponents(std::span<const double> lambdas, std::size_t len) {
  if (len == 0) return {};
  if (len - 1 > lambdas.size())
    throw std::invalid_argument("context is longer than the parameter history");
  std::vector<double> e(len);
  double product = 1.0;
  for (std::size_t x = 1; x < len; ++x) {
    e[x] = lambdas[x - 1];
    product *= lambdas[x - 1];
  }
  e[0] = 1.0 / product;
  return e;
}

}  // namespace

SideExponents exponents(const ModelParams& params, std::size_t before_len, std::size_t after_len) {
  return {side_exponents(params.lambda_before, before_len),
          side_exponents(params.lambda_after, after_len)};
}

double log_weighted_product(double prior, std::span<const double> before_terms,
                            std::span<const double> after_terms, const SideExponents& exps) {
  if (before_terms.size() != exps.before.size() || after_terms.size() != exps.after.size())
    throw std::invalid_argument("term count does not match exponents");
  double acc = std::log(prior);
  for (std::size_t d = 0; d < before_terms.size(); ++d) acc += exps.before[d] * std::log(before_terms[d]);
  for (std::size_t d = 0; d < after_terms.size(); ++d) acc += exps.after[d] * std::log(after_terms[d]);
  return acc;
}

double bayes_raw_score(const CooccurrenceGraphSet& graphs, const Vocabulary& vocab,
                       const GapContext& ctx, const ModelParams& params, WordId j,
                       const SmoothingPolicy& smoothing) {
  const double p = vocab.contains(j) ? prior(vocab, j) : smoothing.epsilon();
  std::vector<double> before(ctx.before.size());
  std::vector<double> after(ctx.after.size());
  for (std::size_t d = 0; d < before.size(); ++d)
    before[d] = conditional(graphs, d, ctx.before[d], j, smoothing);
  for (std::size_t d = 0; d < after.size(); ++d)
    after[d] = reversed_conditional(graphs, d, j, ctx.after[d], smoothing);
  return std::exp(log_weighted_product(p, before, after,
                                       exponents(params, before.size(), after.size())));
}

GapFeatures extract_features(const Model& model, const GapContext& ctx) {
  if (ctx.candidates.empty()) throw std::invalid_argument("gap has no candidates");
  const std::size_t limit = model.graphs.max_distance();
  if (ctx.before.size() > limit || ctx.after.size() > limit)
    throw std::invalid_argument("context is longer than the trained maximum distance");

  const SmoothingPolicy smoothing = model.smoothing();
  const std::size_t k = ctx.candidates.size();
  GapFeatures f;
  f.prior.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const WordId w = ctx.candidates[c];
    f.prior[c] = model.vocab.contains(w) ? prior(model.vocab, w) : smoothing.epsilon();
  }

  std::vector<double> raw(k);
  for (std::size_t d = 0; d < ctx.before.size(); ++d) {
    for (std::size_t c = 0; c < k; ++c)
      raw[c] = conditional(model.graphs, d, ctx.before[d], ctx.candidates[c], smoothing);
    f.before.push_back(rank_equalize(raw, TiePolicy::Average));
  }
  for (std::size_t d = 0; d < ctx.after.size(); ++d) {
    for (std::size_t c = 0; c < k; ++c)
      raw[c] = reversed_conditional(model.graphs, d, ctx.candidates[c], ctx.after[d], smoothing);
    f.after.push_back(rank_equalize(raw, TiePolicy::Average));
  }

  std::vector<WordId> context(ctx.before);
  context.insert(context.end(), ctx.after.begin(), ctx.after.end());
  f.lsa_raw.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    if (!model.srt.has_row(ctx.candidates[c])) continue;
    const SemanticDistance dist = semantic_distance_sum(model.srt, ctx.candidates[c], context);
    if (dist.context_used > 0) f.lsa_raw[c] = semantic_similarity(dist.sum, dist.context_used);
  }
  f.lsa = rank_equalize(f.lsa_raw, TiePolicy::Average, kScoreTieTolerance);
  return f;
}

GapScores score_gap(const GapFeatures& features, const ModelParams& params,
                    std::optional<double> alpha_override) {
  const std::size_t k = features.candidates();
  const SideExponents exps = exponents(params, features.before.size(), features.after.size());
  GapScores s;
  s.log_bayes.resize(k);
  std::vector<double> before(features.before.size());
  std::vector<double> after(features.after.size());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < before.size(); ++d) before[d] = features.before[d][c];
    for (std::size_t d = 0; d < after.size(); ++d) after[d] = features.after[d][c];
    s.log_bayes[c] = log_weighted_product(features.prior[c], before, after, exps);
  }
  s.bayes_prob = normalize_log_scores(s.log_bayes);
  s.bayes = rank_equalize(s.bayes_prob, TiePolicy::Average, kScoreTieTolerance);
  s.lsa = features.lsa;
  s.theta = hybrid_score(s.bayes, s.lsa, alpha_override.value_or(params.alpha));
  return s;
}

std::vector<std::size_t> rank_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

std::vector<ScoredCandidate> rank_scores(const GapContext& ctx, const GapScores& scores) {
  std::vector<ScoredCandidate> out;
  out.reserve(scores.theta.size());
  for (const std::size_t c : rank_order(scores.theta))
    out.push_back({c, ctx.candidates[c], scores.bayes[c], scores.lsa[c], scores.theta[c]});
  return out;
}

std::vector<ScoredCandidate> predict(const Model& model, const GapContext& ctx,
                                     const ModelParams& params,
                                     std::optional<double> alpha_override) {
  return rank_scores(ctx, score_gap(extract_features(model, ctx), params, alpha_override));
}

std::vector<std::size_t> bayes_only_ranking(const GapFeatures& features, const ModelParams& params) {
  return rank_order(rank_equalize(score_gap(features, params).bayes_prob, TiePolicy::Average, kScoreTieTolerance));
}

std::vector<std::size_t> lsa_only_ranking(const GapFeatures& features) {
  return rank_order(rank_equalize(features.lsa_raw, TiePolicy::Average, kScoreTieTolerance));
}

}  // namespace lexblend
