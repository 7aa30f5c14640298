#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lexblend {

using WordId = std::uint32_t;
inline constexpr WordId kNoWord = std::numeric_limits<WordId>::max();

using StopwordSet = std::unordered_set<std::string>;

struct Sentence {
  std::vector<std::string> tokens;
  std::uint32_t source_id = 0;
  std::uint32_t nonstop_count = 0;

  bool operator==(const Sentence&) const = default;
};

// Dense word <-> id mapping with unigram counts. Ids follow first-occurrence
// order, so a fixed document order gives a fixed vocabulary.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Registers `count` more occurrences of `word`, creating an id if needed.
  WordId add(std::string_view word, std::uint64_t count = 1);

  WordId id(std::string_view word) const noexcept;  // kNoWord when absent
  bool contains(WordId id) const noexcept { return id < words_.size(); }
  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t count(WordId id) const { return counts_.at(id); }

  std::size_t size() const noexcept { return words_.size(); }
  std::uint64_t total_tokens() const noexcept { return total_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  // Folds another vocabulary in; ids of `other` words new to this one are
  // appended in `other`'s id order.
  void merge(const Vocabulary& other);

  std::vector<WordId> lookup(std::span<const std::string> tokens) const;

  bool operator==(const Vocabulary& rhs) const {
    return words_ == rhs.words_ && counts_ == rhs.counts_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, WordId, Hash, std::equal_to<>> index_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Returns the text between the Project Gutenberg "*** START OF" and
// "*** END OF" marker lines, or the input unchanged when either is missing.
std::string strip_boilerplate(std::string_view raw_text);

// Lowercased word tokens of `text`. Letters, digits and non-punctuation
// non-ASCII code points form words; an apostrophe or hyphen is kept only
// between two word characters. U+2019 is folded to an ASCII apostrophe.
std::vector<std::string> tokenize_words(std::string_view text);

// Splits on '.', '!', '?' and on blank lines (paragraph breaks); sentences
// with no word tokens are dropped.
std::vector<Sentence> tokenize_sentences(std::string_view body, const StopwordSet& stopwords,
                                         std::uint32_t source_id = 0);

// Throws EmptyCorpus when the sentences hold no tokens.
Vocabulary build_vocabulary(std::span<const Sentence> sentences);

// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);
StopwordSet parse_stopwords(std::string_view text);

// Path of the stopword list shipped in data/.
std::filesystem::path default_stopword_path();

std::string detokenize(const Sentence& sentence);

struct CorpusDocument {
  std::string name;
  std::vector<Sentence> sentences;
};

// Reads every *.txt file under `dir` (sorted by file name), strips
// boilerplate and tokenizes. Throws IoError when `dir` is unreadable and
// EmptyCorpus when it holds no .txt file.
std::vector<CorpusDocument> read_corpus_dir(const std::filesystem::path& dir,
                                            const StopwordSet& stopwords);

}  // namespace lexblend
