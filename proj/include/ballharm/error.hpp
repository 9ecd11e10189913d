#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ballharm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (bad index, |x| > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid resolution, degree cap exceeded, mismatched settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class UnderdeterminedError : public Error {
 public:
  UnderdeterminedError(std::size_t have, std::size_t required)
      : Error("underdetermined system: " + std::to_string(have) + " samples, at least " +
              std::to_string(required) + " required"),
        have_(have),
        required_(required) {}

  std::size_t have() const noexcept { return have_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t have_;
  std::size_t required_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ballharm
