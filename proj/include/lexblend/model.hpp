#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "lexblend/cooccur.hpp"
#include "lexblend/corpus.hpp"
#include "lexblend/lsa.hpp"

namespace lexblend {

struct TrainConfig {
  std::size_t max_distance = kDefaultMaxDistance;
  std::size_t svd_rank = 0;  // 0 selects auto_rank()
  std::uint32_t min_nonstop = kDefaultMinNonstop;
  double epsilon = 1e-9;
  std::uint64_t svd_seed = 0x5eedULL;

  bool operator==(const TrainConfig&) const = default;
};

// Both trained sub-models plus the vocabulary they share. Immutable once
// trained; safe to share across threads.
struct Model {
  TrainConfig config;
  Vocabulary vocab;
  CooccurrenceGraphSet graphs{kDefaultMaxDistance};
  SemanticReducedTable srt;
  std::string fingerprint;  // hex SHA-256 of the tokenized corpus
  std::uint64_t sentence_count = 0;
  std::uint64_t qualifying_sentences = 0;

  SmoothingPolicy smoothing() const { return SmoothingPolicy(config.epsilon); }
  bool operator==(const Model& rhs) const;
};

std::string corpus_fingerprint(std::span<const Sentence> sentences);

// Throws EmptyCorpus, NoQualifyingSentences or RankTooLarge.
Model train_model(std::span<const Sentence> sentences, const TrainConfig& config);

}  // namespace lexblend
