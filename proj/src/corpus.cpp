#include "lexblend/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "lexblend/errors.hpp"

namespace lexblend {

WordId Vocabulary::add(std::string_view word, std::uint64_t count) {
  auto it = index_.find(word);
  WordId id;
  if (it == index_.end()) {
    id = static_cast<WordId>(words_.size());
    index_.emplace(std::string(word), id);
    words_.emplace_back(word);
    counts_.push_back(0);
  } else {
    id = it->second;
  }
  counts_[id] += count;
  total_ += count;
  return id;
}

WordId Vocabulary::id(std::string_view word) const noexcept {
  auto it = index_.find(word);
  return it == index_.end() ? kNoWord : it->second;
}

void Vocabulary::merge(const Vocabulary& other) {
  for (std::size_t i = 0; i < other.words_.size(); ++i) add(other.words_[i], other.counts_[i]);
}

std::vector<WordId> Vocabulary::lookup(std::span<const std::string> tokens) const {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

namespace {

// Finds a marker line such as "*** START OF THE PROJECT GUTENBERG EBOOK X ***".
// Returns [line_begin, line_end) of the first match.
std::optional<std::pair<std::size_t, std::size_t>> find_marker(std::string_view text,
                                                               std::string_view keyword) {
  std::size_t pos = 0;
  while ((pos = text.find("***", pos)) != std::string_view::npos) {
    std::size_t p = pos + 3;
    while (p < text.size() && text[p] == ' ') ++p;
    if (text.substr(p, keyword.size()) == keyword) {
      std::size_t begin = text.rfind('\n', pos);
      begin = begin == std::string_view::npos ? 0 : begin + 1;
      std::size_t end = text.find('\n', p);
      end = end == std::string_view::npos ? text.size() : end + 1;
      return std::make_pair(begin, end);
    }
    pos += 3;
  }
  return std::nullopt;
}

struct CodePoint {
  char32_t value;
  std::size_t length;
};

CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, static_cast<std::size_t>(len)};
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;  // Latin-1 symbols, NBSP
  if (cp >= 0x2000 && cp <= 0x206F) return false;            // general punctuation
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp == 0xFEFF || cp == 0xFFFD) return false;
  return true;
}

bool is_joiner(char32_t cp) { return cp == '\'' || cp == 0x2019 || cp == '-' || cp == 0x2010; }

char32_t canonical_joiner(char32_t cp) { return (cp == '\'' || cp == 0x2019) ? U'\'' : U'-'; }

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

bool is_terminator(char32_t cp) { return cp == '.' || cp == '!' || cp == '?'; }

// Drives both word and sentence tokenization. `on_token` receives each token,
// `on_boundary` is called at every sentence boundary.
template <typename OnToken, typename OnBoundary>
void scan(std::string_view text, OnToken on_token, OnBoundary on_boundary) {
  std::string token;
  bool line_blank = true;
  auto flush = [&] {
    if (!token.empty()) {
      on_token(std::move(token));
      token.clear();
    }
  };
  for (std::size_t i = 0; i < text.size();) {
    const CodePoint cp = decode(text, i);
    i += cp.length;
    if (is_word_char(cp.value)) {
      encode(to_lower(cp.value), token);
      line_blank = false;
      continue;
    }
    if (is_joiner(cp.value) && !token.empty() && i < text.size() &&
        is_word_char(decode(text, i).value)) {
      encode(canonical_joiner(cp.value), token);
      continue;
    }
    flush();
    if (is_terminator(cp.value)) {
      on_boundary();
      line_blank = false;
    } else if (cp.value == '\n') {
      if (line_blank) on_boundary();
      line_blank = true;
    } else if (cp.value != ' ' && cp.value != '\t' && cp.value != '\r') {
      line_blank = false;
    }
  }
  flush();
  on_boundary();
}

}  // namespace

std::string strip_boilerplate(std::string_view raw_text) {
  const auto start = find_marker(raw_text, "START OF");
  if (!start) return std::string(raw_text);
  const auto end = find_marker(raw_text.substr(start->second), "END OF");
  if (!end) return std::string(raw_text);
  return std::string(raw_text.substr(start->second, end->first));
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  scan(text, [&](std::string&& t) { out.push_back(std::move(t)); }, [] {});
  return out;
}

std::vector<Sentence> tokenize_sentences(std::string_view body, const StopwordSet& stopwords,
                                         std::uint32_t source_id) {
  std::vector<Sentence> out;
  Sentence current;
  current.source_id = source_id;
  scan(
      body,
      [&](std::string&& t) {
        if (!stopwords.contains(t)) ++current.nonstop_count;
        current.tokens.push_back(std::move(t));
      },
      [&] {
        if (current.tokens.empty()) return;
        out.push_back(std::move(current));
        current = Sentence{};
        current.source_id = source_id;
      });
  return out;
}

Vocabulary build_vocabulary(std::span<const Sentence> sentences) {
  Vocabulary vocab;
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) vocab.add(t);
  if (vocab.total_tokens() == 0) throw EmptyCorpus();
  return vocab;
}

StopwordSet parse_stopwords(std::string_view text) {
  StopwordSet words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty() && line.front() != '#') {
      std::string w(line);
      std::transform(w.begin(), w.end(), w.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      words.insert(std::move(w));
    }
    pos = nl + 1;
  }
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read stopword list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_stopwords(ss.str());
}

std::filesystem::path default_stopword_path() {
  return std::filesystem::path(LEXBLEND_DATA_DIR) / "stopwords.txt";
}

std::string detokenize(const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += sentence.tokens[i];
  }
  return out;
}

std::vector<CorpusDocument> read_corpus_dir(const std::filesystem::path& dir,
                                            const StopwordSet& stopwords) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  if (files.empty()) throw EmptyCorpus("no .txt files in " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<CorpusDocument> docs;
  docs.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::ifstream in(files[i], std::ios::binary);
    if (!in) throw IoError("cannot read " + files[i].string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string body = strip_boilerplate(ss.str());
    docs.push_back({fs::relative(files[i], dir).generic_string(),
                    tokenize_sentences(body, stopwords, static_cast<std::uint32_t>(i))});
  }
  return docs;
}

}  // namespace lexblend
