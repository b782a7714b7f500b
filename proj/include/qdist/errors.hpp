#pragma once

#include <stdexcept>
#include <string>

namespace qdist {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite input, unnormalized state and similar numeric domain violations.
class NumericDomainError : public Error {
public:
  using Error::Error;
};

/// Inconsistent DD levels, plan/state width mismatches.
class StructuralError : public Error {
public:
  using Error::Error;
};

class ArgumentError : public Error {
public:
  using Error::Error;
};

class CapacityError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class DecodeError : public Error {
public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error("offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class TransportError : public Error {
public:
  using Error::Error;
};

} // namespace qdist
