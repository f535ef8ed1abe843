#pragma once

#include <stdexcept>
#include <string>

namespace caper {

// Base of every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition (dimension mismatch, overlapping pairs, eps <= 0 ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// External base aligner failed to run or returned a nonzero status.
class ExternalAlignerError : public Error {
 public:
  ExternalAlignerError(std::string command, int status, std::string diagnostics)
      : Error("external aligner failed (status " + std::to_string(status) + "): " + command +
              (diagnostics.empty() ? std::string() : "\n" + diagnostics)),
        command_(std::move(command)),
        status_(status),
        diagnostics_(std::move(diagnostics)) {}

  const std::string& command() const noexcept { return command_; }
  int status() const noexcept { return status_; }
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string command_;
  int status_;
  std::string diagnostics_;
};

// External base aligner ran but its output file could not be parsed.
class ExternalOutputError : public Error {
 public:
  using Error::Error;
};

// Bad configuration key or value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace caper
