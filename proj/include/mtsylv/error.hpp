#pragma once

#include <stdexcept>
#include <string>

namespace mtsylv {

enum class ErrorKind {
  InvalidInput,
  SpectraOverlap,
  NumericalFailure,
  OracleTooLarge,
  NoUniqueSolution,
  InvalidWindow,
  ShiftFailure,
  Diverged,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind lets
/// callers (notably the CLI) map failures to exit codes without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(long line, const std::string& what)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace mtsylv
