#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slantgeo {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Expression evaluated outside its domain (ln of a non-positive number, division by zero, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

// Metric singular, indefinite or badly conditioned at a point; missing structure.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// The differential has rank 0 or full rank where a proper split is required.
class DegenerateMapError : public Error {
 public:
  using Error::Error;
};

// Invalid scenario file or command-line input. `line` is 1-based, 0 when unknown.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace slantgeo
