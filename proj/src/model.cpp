#include "lexblend/model.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <stdexcept>

#include "lexblend/errors.hpp"

namespace lexblend {

bool Model::operator==(const Model& rhs) const {
  return config == rhs.config && vocab == rhs.vocab && graphs == rhs.graphs && srt == rhs.srt &&
         fingerprint == rhs.fingerprint && sentence_count == rhs.sentence_count &&
         qualifying_sentences == rhs.qualifying_sentences;
}

std::string corpus_fingerprint(std::span<const Sentence> sentences) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 unavailable");
  constexpr char kTokenSep = '\x1f';
  constexpr char kSentenceSep = '\x1e';
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      EVP_DigestUpdate(ctx.get(), t.data(), t.size());
      EVP_DigestUpdate(ctx.get(), &kTokenSep, 1);
    }
    EVP_DigestUpdate(ctx.get(), &kSentenceSep, 1);
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

Model train_model(std::span<const Sentence> sentences, const TrainConfig& config) {
  [[maybe_unused]] const SmoothingPolicy validated(config.epsilon);
  Model model;
  model.config = config;
  model.vocab = build_vocabulary(sentences);
  model.graphs = train_graphs(sentences, model.vocab, config.max_distance);

  const RelationshipTable table = build_relationship_table(sentences, model.vocab, config.min_nonstop);
  const std::size_t rank = config.svd_rank == 0 ? auto_rank(table) : config.svd_rank;
  SvdOptions svd;
  svd.seed = config.svd_seed;
  model.srt = reduce_svd(table, rank, svd);
  model.config.svd_rank = rank;

  model.fingerprint = corpus_fingerprint(sentences);
  model.sentence_count = sentences.size();
  model.qualifying_sentences = table.sentence_index.size();
  return model;
}

}  // namespace lexblend
