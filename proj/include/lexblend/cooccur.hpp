#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "lexblend/corpus.hpp"

namespace lexblend {

inline constexpr std::size_t kDefaultMaxDistance = 16;

// Probability floor substituted for absent co-occurrences.
class SmoothingPolicy {
 public:
  SmoothingPolicy() = default;
  explicit SmoothingPolicy(double epsilon);  // throws std::invalid_argument outside (0, 1)
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_ = 1e-9;
};

struct Edge {
  WordId from;
  WordId to;
  std::uint32_t weight;

  bool operator==(const Edge&) const = default;
};

// One sparse directed graph per inter-word distance d (number of words
// strictly between the pair). Edge direction follows text order.
class CooccurrenceGraphSet {
 public:
  explicit CooccurrenceGraphSet(std::size_t max_distance = kDefaultMaxDistance);

  std::size_t max_distance() const noexcept { return graphs_.size(); }

  // Counts every ordered pair (p < q) with q - p - 1 < max_distance.
  // kNoWord positions keep their slot but contribute no edges.
  void add_sentence(std::span<const WordId> ids);
  void add_edge(std::size_t d, WordId from, WordId to, std::uint32_t weight);
  void merge(const CooccurrenceGraphSet& other);

  std::uint32_t weight(std::size_t d, WordId from, WordId to) const noexcept;
  std::uint64_t out_mass(std::size_t d, WordId from) const noexcept;
  std::uint64_t in_mass(std::size_t d, WordId to) const noexcept;

  std::size_t edge_count(std::size_t d) const { return graphs_.at(d).weights.size(); }
  std::uint64_t total_weight(std::size_t d) const { return graphs_.at(d).total; }

  // Edges of graph d sorted by (from, to).
  std::vector<Edge> edges(std::size_t d) const;

  bool operator==(const CooccurrenceGraphSet& rhs) const;

 private:
  struct Graph {
    absl::flat_hash_map<std::uint64_t, std::uint32_t> weights;
    std::vector<std::uint64_t> out_mass;
    std::vector<std::uint64_t> in_mass;
    std::uint64_t total = 0;
  };

  static std::uint64_t key(WordId from, WordId to) noexcept {
    return (static_cast<std::uint64_t>(from) << 32) | to;
  }

  std::vector<Graph> graphs_;
};

CooccurrenceGraphSet train_graphs(std::span<const Sentence> sentences, const Vocabulary& vocab,
                                  std::size_t max_distance = kDefaultMaxDistance);

// unigram_count / total_tokens. Throws UnknownWord for ids outside the vocabulary.
double prior(const Vocabulary& vocab, WordId word);

// w^d(i, j) / sum_j' w^d(i, j'), or 0 when i has no out-edges in graph d.
double raw_conditional(const CooccurrenceGraphSet& graphs, std::size_t d, WordId i, WordId j);

// raw_conditional floored at epsilon; unknown ids also give epsilon.
// Throws std::out_of_range when d >= max_distance.
double conditional(const CooccurrenceGraphSet& graphs, std::size_t d, WordId i, WordId j,
                   const SmoothingPolicy& smoothing);

// Reads the same graphs from the suggestion towards a word after the gap:
// conditional(d, suggestion, after_word).
double reversed_conditional(const CooccurrenceGraphSet& graphs, std::size_t d, WordId suggestion,
                            WordId after_word, const SmoothingPolicy& smoothing);

}  // namespace lexblend
