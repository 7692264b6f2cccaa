#ifndef INTRAREL_ERROR_H_
#define INTRAREL_ERROR_H_

#include <stdexcept>
#include <string>

namespace intrarel {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON line, bracketed tree, vector file).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input is well-formed but violates a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or unsupported configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File layout problems that are not line-level syntax errors.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A keyed lookup (e.g. a sentence in a contextual-vector file) failed.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Training diverged: loss or gradient became non-finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace intrarel

#endif  // INTRAREL_ERROR_H_
