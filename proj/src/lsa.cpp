#include "lexblend/lsa.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lexblend/errors.hpp"

namespace lexblend {

RelationshipTable build_relationship_table(std::span<const Sentence> sentences,
                                           const Vocabulary& vocab, std::uint32_t min_nonstop) {
  std::vector<Eigen::Triplet<double>> triplets;
  RelationshipTable table;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (sentences[s].nonstop_count < min_nonstop) continue;
    const auto col = static_cast<int>(table.sentence_index.size());
    table.sentence_index.push_back(static_cast<std::uint32_t>(s));
    for (const auto& token : sentences[s].tokens) {
      const WordId id = vocab.id(token);
      if (id != kNoWord) triplets.emplace_back(static_cast<int>(id), col, 1.0);
    }
  }
  if (table.sentence_index.empty()) throw NoQualifyingSentences();
  table.counts.resize(static_cast<Eigen::Index>(vocab.size()),
                      static_cast<Eigen::Index>(table.sentence_index.size()));
  // duplicates are summed, giving per-sentence counts
  table.counts.setFromTriplets(triplets.begin(), triplets.end());
  table.counts.makeCompressed();
  return table;
}

namespace {

// Flips each column so its largest-magnitude entry is positive; the
// decomposition is only defined up to column signs.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd* v) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index arg = 0;
    u.col(c).cwiseAbs().maxCoeff(&arg);
    if (u(arg, c) < 0) {
      u.col(c) *= -1.0;
      if (v && v->cols() > c) v->col(c) *= -1.0;
    }
  }
}

// A * (A^T * x), streamed over column blocks of A.
Eigen::MatrixXd gram_product(const SparseCounts& a, const Eigen::MatrixXd& x) {
  constexpr Eigen::Index kBlock = 65536;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(a.rows(), x.cols());
  for (Eigen::Index c0 = 0; c0 < a.cols(); c0 += kBlock) {
    const Eigen::Index len = std::min(kBlock, a.cols() - c0);
    const auto block = a.middleCols(c0, len);
    const Eigen::MatrixXd t = block.transpose() * x;
    y.noalias() += block * t;
  }
  return y;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

SvdResult exact_svd(const Eigen::MatrixXd& matrix, std::size_t k) {
  const auto limit = static_cast<std::size_t>(std::min(matrix.rows(), matrix.cols()));
  if (k == 0) throw std::invalid_argument("rank must be at least 1");
  if (k > limit) throw RankTooLarge(k, limit);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto kk = static_cast<Eigen::Index>(k);
  SvdResult out{svd.matrixU().leftCols(kk), svd.singularValues().head(kk),
                svd.matrixV().leftCols(kk)};
  fix_signs(out.u, &out.v);
  return out;
}

SvdResult randomized_svd(const SparseCounts& matrix, std::size_t k, const SvdOptions& options) {
  const auto limit = static_cast<std::size_t>(std::min(matrix.rows(), matrix.cols()));
  if (k == 0) throw std::invalid_argument("rank must be at least 1");
  if (k > limit) throw RankTooLarge(k, limit);
  const auto width = static_cast<Eigen::Index>(std::min(k + options.oversample, limit));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd q(matrix.rows(), width);
  for (Eigen::Index c = 0; c < width; ++c)
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) q(r, c) = normal(rng);
  q = orthonormalize(q);

  const std::size_t iterations = std::max<std::size_t>(1, options.power_iterations);
  for (std::size_t it = 0; it < iterations; ++it) q = orthonormalize(gram_product(matrix, q));

  // Q^T A A^T Q = W diag(sigma^2) W^T, so U = Q W.
  const Eigen::MatrixXd small = q.transpose() * gram_product(matrix, q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (small + small.transpose()));
  const auto kk = static_cast<Eigen::Index>(k);
  SvdResult out;
  out.u.resize(matrix.rows(), kk);
  out.singular_values.resize(kk);
  // eigenvalues come back ascending
  for (Eigen::Index c = 0; c < kk; ++c) {
    const Eigen::Index src = width - 1 - c;
    out.singular_values(c) = std::sqrt(std::max(0.0, eig.eigenvalues()(src)));
    out.u.col(c) = q * eig.eigenvectors().col(src);
  }
  fix_signs(out.u, nullptr);
  return out;
}

SvdResult truncated_svd(const SparseCounts& matrix, std::size_t k, const SvdOptions& options) {
  const auto entries = static_cast<std::size_t>(matrix.rows()) * static_cast<std::size_t>(matrix.cols());
  if (entries <= options.dense_limit) return exact_svd(Eigen::MatrixXd(matrix), k);
  return randomized_svd(matrix, k, options);
}

SemanticReducedTable::SemanticReducedTable(RowMatrixF vectors, std::vector<std::uint8_t> present,
                                           std::vector<double> singular_values)
    : vectors_(std::move(vectors)),
      present_(std::move(present)),
      singular_values_(std::move(singular_values)) {
  if (present_.size() != static_cast<std::size_t>(vectors_.rows()))
    throw std::invalid_argument("presence mask does not match row count");
  if (singular_values_.size() != static_cast<std::size_t>(vectors_.cols()))
    throw std::invalid_argument("singular value count does not match rank");
}

std::span<const float> SemanticReducedTable::row(WordId word) const {
  if (word >= rows()) throw std::out_of_range("no semantic row for word id");
  return {vectors_.data() + static_cast<std::size_t>(word) * rank(), rank()};
}

bool SemanticReducedTable::operator==(const SemanticReducedTable& rhs) const {
  return vectors_.rows() == rhs.vectors_.rows() && vectors_.cols() == rhs.vectors_.cols() &&
         std::equal(vectors_.data(), vectors_.data() + vectors_.size(), rhs.vectors_.data()) &&
         present_ == rhs.present_ && singular_values_ == rhs.singular_values_;
}

SemanticReducedTable reduce_svd(const RelationshipTable& table, std::size_t k,
                                const SvdOptions& options) {
  if (table.counts.rows() == 0 || table.counts.cols() == 0)
    throw std::invalid_argument("relationship table is empty");
  const SvdResult svd = truncated_svd(table.counts, k, options);

  RowMatrixF vectors = (svd.u * svd.singular_values.asDiagonal()).cast<float>();
  std::vector<std::uint8_t> present(static_cast<std::size_t>(table.counts.rows()), 0);
  for (Eigen::Index c = 0; c < table.counts.outerSize(); ++c)
    for (SparseCounts::InnerIterator it(table.counts, c); it; ++it)
      present[static_cast<std::size_t>(it.row())] = 1;
  for (std::size_t r = 0; r < present.size(); ++r)
    if (!present[r]) vectors.row(static_cast<Eigen::Index>(r)).setZero();

  std::vector<double> sv(svd.singular_values.data(),
                         svd.singular_values.data() + svd.singular_values.size());
  return SemanticReducedTable(std::move(vectors), std::move(present), std::move(sv));
}

std::size_t auto_rank(const RelationshipTable& table) {
  const auto limit = static_cast<std::size_t>(std::min(table.counts.rows(), table.counts.cols()));
  const std::size_t target = table.counts.cols() >= 10000 ? 300 : 50;
  return std::max<std::size_t>(1, std::min(target, limit));
}

SemanticDistance semantic_distance_sum(const SemanticReducedTable& srt, WordId candidate,
                                       std::span<const WordId> context) {
  if (!srt.has_row(candidate)) throw CandidateUnknown();
  const auto cand = srt.row(candidate);
  SemanticDistance out;
  for (const WordId w : context) {
    if (!srt.has_row(w)) continue;
    const auto other = srt.row(w);
    double sq = 0.0;
    for (std::size_t c = 0; c < cand.size(); ++c) {
      const double diff = static_cast<double>(cand[c]) - static_cast<double>(other[c]);
      sq += diff * diff;
    }
    out.sum += 1.0 / (std::sqrt(sq) + 1.0);
    ++out.context_used;
  }
  return out;
}

double semantic_similarity(double distance_sum, std::size_t n) {
  if (n == 0) throw ZeroContext();
  return distance_sum / static_cast<double>(n);
}

}  // namespace lexblend
