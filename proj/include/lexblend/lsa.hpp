#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lexblend/corpus.hpp"

namespace lexblend {

inline constexpr std::uint32_t kDefaultMinNonstop = 5;

using SparseCounts = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Term x sentence count matrix. Rows are vocabulary ids; column t holds the
// word counts of the t-th sentence that passed the non-stopword filter.
struct RelationshipTable {
  SparseCounts counts;
  std::vector<std::uint32_t> sentence_index;  // column -> position in the input span
};

// Keeps sentences with nonstop_count >= min_nonstop.
// Throws NoQualifyingSentences when none pass.
RelationshipTable build_relationship_table(std::span<const Sentence> sentences,
                                           const Vocabulary& vocab,
                                           std::uint32_t min_nonstop = kDefaultMinNonstop);

struct SvdOptions {
  std::size_t oversample = 10;
  std::size_t power_iterations = 4;
  std::uint64_t seed = 0x5eedULL;
  // Matrices with rows * cols up to this many entries go through a dense
  // exact decomposition; larger ones through the randomized range finder.
  std::size_t dense_limit = 4'000'000;
};

struct SvdResult {
  Eigen::MatrixXd u;                 // rows x k
  Eigen::VectorXd singular_values;   // k, non-increasing
  Eigen::MatrixXd v;                 // cols x k; empty for the randomized path
};

// Exact thin SVD truncated to rank k. Throws RankTooLarge when k > min(dims).
SvdResult exact_svd(const Eigen::MatrixXd& matrix, std::size_t k);

// Randomized subspace iteration on A * A^T; returns U and the singular values
// only. Memory stays O(rows * (k + oversample)) regardless of column count.
SvdResult randomized_svd(const SparseCounts& matrix, std::size_t k, const SvdOptions& options);

// Dispatches on SvdOptions::dense_limit.
SvdResult truncated_svd(const SparseCounts& matrix, std::size_t k, const SvdOptions& options = {});

// |V| x k word vectors (U_k * Sigma_k). Words that never occur in a
// qualifying sentence have no row.
class SemanticReducedTable {
 public:
  SemanticReducedTable() = default;
  SemanticReducedTable(RowMatrixF vectors, std::vector<std::uint8_t> present,
                       std::vector<double> singular_values);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(vectors_.cols()); }

  bool has_row(WordId word) const noexcept { return word < present_.size() && present_[word] != 0; }
  std::span<const float> row(WordId word) const;

  const RowMatrixF& vectors() const noexcept { return vectors_; }
  const std::vector<std::uint8_t>& present() const noexcept { return present_; }
  const std::vector<double>& singular_values() const noexcept { return singular_values_; }

  bool operator==(const SemanticReducedTable& rhs) const;

 private:
  RowMatrixF vectors_;
  std::vector<std::uint8_t> present_;
  std::vector<double> singular_values_;
};

SemanticReducedTable reduce_svd(const RelationshipTable& table, std::size_t k,
                                const SvdOptions& options = {});

// Rank used when none is requested: 300 for full corpora, 50 for small ones,
// never above min(dims).
std::size_t auto_rank(const RelationshipTable& table);

struct SemanticDistance {
  double sum = 0.0;            // sum over context words of 1 / (||v_c - v_i|| + 1)
  std::size_t context_used = 0;  // context words that had a vector
};

// Context words without a vector are skipped. Throws CandidateUnknown when
// the candidate itself has no vector.
SemanticDistance semantic_distance_sum(const SemanticReducedTable& srt, WordId candidate,
                                       std::span<const WordId> context);

// distance_sum / n. Throws ZeroContext when n == 0.
double semantic_similarity(double distance_sum, std::size_t n);

}  // namespace lexblend
