#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace irap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N-Triples syntax error; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Interest-expression syntax error; offset is a 0-based byte position.
class InterestSyntaxError : public Error {
 public:
  InterestSyntaxError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ValidationError : public Error {
 public:
  enum class Kind { kDisjointBgp, kDisconnectedOptional, kUnsupportedConstruct, kInvalid };
  ValidationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Raised when a match enumeration exceeds its configured cap.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// I/O or decompression failure; the same operation may be retried later.
class RetryableError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace irap
