#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing input (CLI exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

// A malformed record in a text file. The message always carries the 1-based
// line number of the first offending line.
class ParseError : public InputError {
 public:
  ParseError(const std::string &source, std::size_t line,
             const std::string &what)
      : InputError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Inputs are well formed but the requested quantity is undefined for them,
// e.g. a zero-variance sample or a zero corpus score (CLI exit code 3).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

} // namespace qpp
