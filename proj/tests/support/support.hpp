#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lexblend/eval.hpp"
#include "lexblend/inference.hpp"
#include "lexblend/model.hpp"

namespace lexblend::testing {

// "The sky is blue." and "The blue is a color."
std::vector<Sentence> fixture_sentences();

// Fixture trained with every sentence admitted to the semantic table.
Model fixture_model();

// Sentences of words "w0".."w{vocab-1}" with lengths in [1, max_len].
std::vector<Sentence> random_sentences(std::mt19937_64& rng, std::size_t count, std::size_t vocab,
                                       std::size_t max_len);

// Topic-structured generator: each topic owns a block of words and a sparse
// successor table, so both co-occurrence and topic overlap carry signal.
class SyntheticLanguage {
 public:
  explicit SyntheticLanguage(std::uint64_t seed, std::size_t topics = 5, std::size_t words_per_topic = 12);

  std::vector<std::string> sentence(std::size_t min_len = 8, std::size_t max_len = 12);
  std::vector<Sentence> corpus(std::size_t sentences);
  // Gap at an interior position, four distractors drawn from the vocabulary.
  std::vector<ChallengeItem> challenge(std::size_t items);

  const std::vector<std::string>& vocabulary() const { return words_; }

 private:
  std::mt19937_64 rng_;
  std::size_t topics_;
  std::size_t per_topic_;
  std::vector<std::string> words_;
  std::vector<std::vector<std::size_t>> successors_;
};

// Desk-scale setting shared by optimization tests: 50-sentence corpus and a
// 200-item challenge.
struct SyntheticSetup {
  Model model;
  std::vector<ChallengeItem> items;
};
SyntheticSetup synthetic_setup(std::uint64_t seed = 42, std::size_t sentences = 50, std::size_t items = 200);

// Writes sentences as a .txt file, one sentence per line ending in '.'.
void write_corpus_file(const std::filesystem::path& path, const std::vector<Sentence>& sentences);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

double relative_error(double analytic, double numeric);

// Scalar re-derivation of the scoring pipeline used as a test oracle: ranks
// by counting, conditionals from the edge lists, products without logs.
// Values within `tolerance` of each other (relative) count as equal.
std::vector<double> oracle_equalize(const std::vector<double>& values, double tolerance = 0.0);

struct OracleScores {
  std::vector<double> bayes_prob;
  std::vector<double> bayes;
  std::vector<double> lsa_raw;
  std::vector<double> lsa;
  std::vector<double> theta;
};
OracleScores oracle_scores(const Model& model, const GapContext& ctx, const ModelParams& params, double alpha);

// Central finite differences (h = 1e-6) against the analytic gradients over
// random states. The lambda check differentiates the error with the
// equalized terms and gamma held fixed.
struct GradientCheck {
  std::size_t alpha_states = 0;
  std::size_t lambda_states = 0;
  double worst_alpha = 0.0;   // largest relative error seen
  double worst_lambda = 0.0;
};
GradientCheck gradient_check(std::uint64_t seed, std::size_t states);

}  // namespace lexblend::testing
