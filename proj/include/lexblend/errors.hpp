#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexblend {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus contains no tokens") {}
  explicit EmptyCorpus(const std::string& what) : Error(what) {}
};

class UnknownWord : public Error {
 public:
  explicit UnknownWord(const std::string& word) : Error("unknown word: " + word) {}
};

class NoQualifyingSentences : public Error {
 public:
  NoQualifyingSentences() : Error("no sentence passes the non-stopword filter") {}
};

class RankTooLarge : public Error {
 public:
  RankTooLarge(std::size_t k, std::size_t limit)
      : Error("rank " + std::to_string(k) + " exceeds min(dims) = " + std::to_string(limit)) {}
};

class ZeroContext : public Error {
 public:
  ZeroContext() : Error("semantic similarity needs at least one context word") {}
};

class CandidateUnknown : public Error {
 public:
  CandidateUnknown() : Error("candidate has no semantic vector") {}
};

class DegenerateTerm : public Error {
 public:
  DegenerateTerm() : Error("non-positive conditional term in lambda gradient") {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptModel : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersion : public Error {
 public:
  explicit UnsupportedVersion(unsigned version)
      : Error("unsupported model format version " + std::to_string(version)) {}
};

}  // namespace lexblend
