#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace lexblend::testing {

std::vector<Sentence> fixture_sentences() {
  return tokenize_sentences("The sky is blue. The blue is a color.", load_stopwords(default_stopword_path()));
}

Model fixture_model() {
  TrainConfig config;
  config.min_nonstop = 1;
  return train_model(fixture_sentences(), config);
}

std::vector<Sentence> random_sentences(std::mt19937_64& rng, std::size_t count, std::size_t vocab,
                                       std::size_t max_len) {
  std::vector<Sentence> out(count);
  for (auto& s : out) {
    const std::size_t len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i) s.tokens.push_back("w" + std::to_string(rng() % vocab));
    s.nonstop_count = static_cast<std::uint32_t>(len);
  }
  return out;
}

SyntheticLanguage::SyntheticLanguage(std::uint64_t seed, std::size_t topics, std::size_t words_per_topic)
    : rng_(seed), topics_(topics), per_topic_(words_per_topic) {
  for (std::size_t t = 0; t < topics; ++t)
    for (std::size_t w = 0; w < words_per_topic; ++w)
      words_.push_back("t" + std::to_string(t) + "w" + std::to_string(w));
  successors_.resize(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const std::size_t base = (i / per_topic_) * per_topic_;
    for (int s = 0; s < 2; ++s) successors_[i].push_back(base + rng_() % per_topic_);
  }
}

std::vector<std::string> SyntheticLanguage::sentence(std::size_t min_len, std::size_t max_len) {
  const std::size_t len = min_len + rng_() % (max_len - min_len + 1);
  const std::size_t topic = rng_() % topics_;
  std::size_t cur = topic * per_topic_ + rng_() % per_topic_;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(words_[cur]);
    // mostly follow the successor table, sometimes wander inside the topic
    if (rng_() % 5 == 0)
      cur = topic * per_topic_ + rng_() % per_topic_;
    else
      cur = successors_[cur][rng_() % successors_[cur].size()];
  }
  return out;
}

std::vector<Sentence> SyntheticLanguage::corpus(std::size_t sentences) {
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < sentences; ++i) {
    Sentence s;
    s.tokens = sentence();
    s.nonstop_count = static_cast<std::uint32_t>(s.tokens.size());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ChallengeItem> SyntheticLanguage::challenge(std::size_t items) {
  std::vector<ChallengeItem> out;
  for (std::size_t n = 0; n < items; ++n) {
    const auto words = sentence();
    const std::size_t gap = 3 + rng_() % (words.size() - 6);
    ChallengeItem item;
    item.id = "s" + std::to_string(n);
    item.before.assign(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(gap));
    item.after.assign(words.begin() + static_cast<std::ptrdiff_t>(gap) + 1, words.end());
    item.answer = rng_() % kCandidateCount;
    std::vector<std::string> used{words[gap]};
    for (std::size_t c = 0; c < kCandidateCount; ++c) {
      if (c == item.answer) {
        item.candidates[c] = words[gap];
        continue;
      }
      std::string pick;
      do {
        pick = words_[rng_() % words_.size()];
      } while (std::find(used.begin(), used.end(), pick) != used.end());
      used.push_back(pick);
      item.candidates[c] = pick;
    }
    out.push_back(std::move(item));
  }
  return out;
}

SyntheticSetup synthetic_setup(std::uint64_t seed, std::size_t sentences, std::size_t items) {
  SyntheticLanguage lang(seed);
  const auto corpus = lang.corpus(sentences);
  TrainConfig config;
  config.max_distance = 8;
  return {train_model(corpus, config), lang.challenge(items)};
}

void write_corpus_file(const std::filesystem::path& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path);
  for (const auto& s : sentences) out << detokenize(s) << ".\n";
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "lexblend-XXXXXX").string();
  if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::permissions(path_, std::filesystem::perms::owner_all, std::filesystem::perm_options::add, ec);
  std::filesystem::remove_all(path_, ec);
}

double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return scale == 0.0 ? 0.0 : std::abs(analytic - numeric) / scale;
}

}  // namespace lexblend::testing

namespace lexblend::testing {

std::vector<double> oracle_equalize(const std::vector<double>& values, double tolerance) {
  const double n = static_cast<double>(values.size());
  std::vector<double> out;
  for (const double v : values) {
    double less = 0.0, equal = 0.0;
    for (const double w : values) {
      const bool tied = std::abs(w - v) <= tolerance * std::max(std::abs(w), std::abs(v));
      if (tied)
        equal += 1.0;
      else if (w < v)
        less += 1.0;
    }
    out.push_back((less + (equal + 1.0) / 2.0) / (n * (n + 1.0) / 2.0));
  }
  return out;
}

namespace {

double edge_conditional(const Model& m, std::size_t d, WordId from, WordId to) {
  const double eps = m.config.epsilon;
  double w = 0.0, mass = 0.0;
  for (const Edge& e : m.graphs.edges(d)) {
    if (e.from != from) continue;
    mass += e.weight;
    if (e.to == to) w = e.weight;
  }
  return mass == 0.0 ? eps : std::max(w / mass, eps);
}

}  // namespace

OracleScores oracle_scores(const Model& model, const GapContext& ctx, const ModelParams& params, double alpha) {
  const std::size_t k = ctx.candidates.size();
  const double eps = model.config.epsilon;
  // per-distance equalized terms
  std::vector<std::vector<double>> before, after;
  for (std::size_t d = 0; d < ctx.before.size(); ++d) {
    std::vector<double> raw;
    for (const WordId c : ctx.candidates) raw.push_back(edge_conditional(model, d, ctx.before[d], c));
    before.push_back(oracle_equalize(raw));
  }
  for (std::size_t d = 0; d < ctx.after.size(); ++d) {
    std::vector<double> raw;
    for (const WordId c : ctx.candidates) raw.push_back(edge_conditional(model, d, c, ctx.after[d]));
    after.push_back(oracle_equalize(raw));
  }
  auto exponent = [](const std::vector<double>& lambdas, std::size_t d, std::size_t len) {
    if (d > 0) return lambdas[d - 1];
    double p = 1.0;
    for (std::size_t x = 1; x < len; ++x) p *= lambdas[x - 1];
    return 1.0 / p;
  };

  OracleScores s;
  std::vector<double> raw(k);
  double gamma = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const WordId w = ctx.candidates[c];
    double v = w < model.vocab.size()
                   ? static_cast<double>(model.vocab.count(w)) / static_cast<double>(model.vocab.total_tokens())
                   : eps;
    for (std::size_t d = 0; d < before.size(); ++d)
      v *= std::pow(before[d][c], exponent(params.lambda_before, d, before.size()));
    for (std::size_t d = 0; d < after.size(); ++d)
      v *= std::pow(after[d][c], exponent(params.lambda_after, d, after.size()));
    raw[c] = v;
    gamma += v;
  }
  for (std::size_t c = 0; c < k; ++c) s.bayes_prob.push_back(raw[c] / gamma);
  s.bayes = oracle_equalize(s.bayes_prob, kScoreTieTolerance);

  const auto& vec = model.srt.vectors();
  for (std::size_t c = 0; c < k; ++c) {
    const WordId w = ctx.candidates[c];
    double sum = 0.0, n = 0.0;
    if (model.srt.has_row(w)) {
      std::vector<WordId> context(ctx.before);
      context.insert(context.end(), ctx.after.begin(), ctx.after.end());
      for (const WordId o : context) {
        if (!model.srt.has_row(o)) continue;
        double sq = 0.0;
        for (Eigen::Index j = 0; j < vec.cols(); ++j) {
          const double diff = double(vec(w, j)) - double(vec(o, j));
          sq += diff * diff;
        }
        sum += 1.0 / (std::sqrt(sq) + 1.0);
        n += 1.0;
      }
    }
    s.lsa_raw.push_back(n > 0.0 ? sum / n : 0.0);
  }
  s.lsa = oracle_equalize(s.lsa_raw, kScoreTieTolerance);
  for (std::size_t c = 0; c < k; ++c) s.theta.push_back(alpha * s.bayes[c] + (1.0 - alpha) * s.lsa[c]);
  return s;
}

}  // namespace lexblend::testing

#include "lexblend/optimize.hpp"

namespace lexblend::testing {

GradientCheck gradient_check(std::uint64_t seed, std::size_t states) {
  constexpr double h = 1e-6;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GradientCheck out;

  while (out.alpha_states < states) {
    const double b = u(rng), l = u(rng), alpha = u(rng);
    const auto error = [&](double a) { return 0.5 * std::pow(1.0 - (a * b + (1.0 - a) * l), 2); };
    const double analytic = grad_alpha(b, l, alpha * b + (1.0 - alpha) * l);
    if (std::abs(analytic) < 1e-3) continue;  // relative error is meaningless near zero
    const double numeric = (error(alpha + h) - error(alpha - h)) / (2.0 * h);
    out.worst_alpha = std::max(out.worst_alpha, relative_error(analytic, numeric));
    ++out.alpha_states;
  }

  while (out.lambda_states < states) {
    const std::size_t m = 2 + rng() % 5;
    std::vector<double> terms(m), lambdas(m - 1);
    for (auto& t : terms) t = 0.05 + 0.95 * u(rng);
    for (auto& x : lambdas) x = 0.2 + 2.8 * u(rng);
    const double prior = 0.01 + 0.49 * u(rng), alpha = 0.05 + 0.95 * u(rng), lsa = u(rng);
    const double p0 = 0.05 + 0.9 * u(rng);
    const auto log_product = [&](const std::vector<double>& lam) {
      double prod = 1.0, acc = std::log(prior);
      for (const double x : lam) prod *= x;
      acc += std::log(terms[0]) / prod;
      for (std::size_t d = 1; d < m; ++d) acc += lam[d - 1] * std::log(terms[d]);
      return acc;
    };
    const double gamma = std::exp(log_product(lambdas)) / p0;
    const auto error = [&](const std::vector<double>& lam) {
      const double theta = alpha * std::exp(log_product(lam)) / gamma + (1.0 - alpha) * lsa;
      return 0.5 * (1.0 - theta) * (1.0 - theta);
    };
    const double theta = alpha * p0 + (1.0 - alpha) * lsa;
    const std::size_t x = 1 + rng() % (m - 1);
    const double analytic = grad_lambda({alpha, theta, p0, terms, lambdas}, x);
    if (std::abs(analytic) < 1e-4) continue;
    auto up = lambdas, down = lambdas;
    up[x - 1] += h;
    down[x - 1] -= h;
    const double numeric = (error(up) - error(down)) / (2.0 * h);
    out.worst_lambda = std::max(out.worst_lambda, relative_error(analytic, numeric));
    ++out.lambda_states;
  }
  return out;
}

}  // namespace lexblend::testing
