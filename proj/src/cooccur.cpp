#include "lexblend/cooccur.hpp"

#include <algorithm>
#include <stdexcept>

#include "lexblend/errors.hpp"

namespace lexblend {

SmoothingPolicy::SmoothingPolicy(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("smoothing epsilon must lie in (0, 1)");
}

CooccurrenceGraphSet::CooccurrenceGraphSet(std::size_t max_distance) : graphs_(max_distance) {
  if (max_distance == 0) throw std::invalid_argument("max distance must be at least 1");
}

void CooccurrenceGraphSet::add_edge(std::size_t d, WordId from, WordId to, std::uint32_t weight) {
  if (weight == 0) return;
  Graph& g = graphs_.at(d);
  g.weights[key(from, to)] += weight;
  const std::size_t need = std::max(from, to) + std::size_t{1};
  if (g.out_mass.size() < need) {
    g.out_mass.resize(need, 0);
    g.in_mass.resize(need, 0);
  }
  g.out_mass[from] += weight;
  g.in_mass[to] += weight;
  g.total += weight;
}

void CooccurrenceGraphSet::add_sentence(std::span<const WordId> ids) {
  for (std::size_t p = 0; p < ids.size(); ++p) {
    if (ids[p] == kNoWord) continue;
    const std::size_t last = std::min(ids.size(), p + 1 + graphs_.size());
    for (std::size_t q = p + 1; q < last; ++q) {
      if (ids[q] == kNoWord) continue;
      add_edge(q - p - 1, ids[p], ids[q], 1);
    }
  }
}

void CooccurrenceGraphSet::merge(const CooccurrenceGraphSet& other) {
  if (other.max_distance() != max_distance())
    throw std::invalid_argument("cannot merge graph sets with different max distance");
  for (std::size_t d = 0; d < graphs_.size(); ++d) {
    for (const auto& [k, w] : other.graphs_[d].weights)
      add_edge(d, static_cast<WordId>(k >> 32), static_cast<WordId>(k & 0xffffffffu), w);
  }
}

std::uint32_t CooccurrenceGraphSet::weight(std::size_t d, WordId from, WordId to) const noexcept {
  if (d >= graphs_.size()) return 0;
  const auto& w = graphs_[d].weights;
  auto it = w.find(key(from, to));
  return it == w.end() ? 0 : it->second;
}

std::uint64_t CooccurrenceGraphSet::out_mass(std::size_t d, WordId from) const noexcept {
  if (d >= graphs_.size()) return 0;
  const auto& m = graphs_[d].out_mass;
  return from < m.size() ? m[from] : 0;
}

std::uint64_t CooccurrenceGraphSet::in_mass(std::size_t d, WordId to) const noexcept {
  if (d >= graphs_.size()) return 0;
  const auto& m = graphs_[d].in_mass;
  return to < m.size() ? m[to] : 0;
}

std::vector<Edge> CooccurrenceGraphSet::edges(std::size_t d) const {
  const auto& w = graphs_.at(d).weights;
  std::vector<Edge> out;
  out.reserve(w.size());
  for (const auto& [k, weight] : w)
    out.push_back({static_cast<WordId>(k >> 32), static_cast<WordId>(k & 0xffffffffu), weight});
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  return out;
}

bool CooccurrenceGraphSet::operator==(const CooccurrenceGraphSet& rhs) const {
  if (graphs_.size() != rhs.graphs_.size()) return false;
  for (std::size_t d = 0; d < graphs_.size(); ++d)
    if (graphs_[d].weights != rhs.graphs_[d].weights) return false;
  return true;
}

CooccurrenceGraphSet train_graphs(std::span<const Sentence> sentences, const Vocabulary& vocab,
                                  std::size_t max_distance) {
  CooccurrenceGraphSet graphs(max_distance);
  std::vector<WordId> ids;
  for (const auto& s : sentences) {
    ids.clear();
    for (const auto& t : s.tokens) ids.push_back(vocab.id(t));
    graphs.add_sentence(ids);
  }
  return graphs;
}

double prior(const Vocabulary& vocab, WordId word) {
  if (!vocab.contains(word)) throw UnknownWord(word == kNoWord ? "<none>" : std::to_string(word));
  return static_cast<double>(vocab.count(word)) / static_cast<double>(vocab.total_tokens());
}

double raw_conditional(const CooccurrenceGraphSet& graphs, std::size_t d, WordId i, WordId j) {
  const std::uint64_t mass = graphs.out_mass(d, i);
  if (mass == 0) return 0.0;
  return static_cast<double>(graphs.weight(d, i, j)) / static_cast<double>(mass);
}

double conditional(const CooccurrenceGraphSet& graphs, std::size_t d, WordId i, WordId j,
                   const SmoothingPolicy& smoothing) {
  if (d >= graphs.max_distance()) throw std::out_of_range("distance beyond trained graphs");
  if (i == kNoWord || j == kNoWord) return smoothing.epsilon();
  return std::max(raw_conditional(graphs, d, i, j), smoothing.epsilon());
}

double reversed_conditional(const CooccurrenceGraphSet& graphs, std::size_t d, WordId suggestion,
                            WordId after_word, const SmoothingPolicy& smoothing) {
  return conditional(graphs, d, suggestion, after_word, smoothing);
}

}  // namespace lexblend
