#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace expressive {

/// Input rejected before any processing: wrong dimensions, malformed files,
/// unknown names, invariant violations.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Statistical input that is well formed but degenerate (e.g. zero variance).
class DegenerateInputError : public InputError {
public:
  using InputError::InputError;
};

/// Parse failure tied to a line of a text input.
class ParseError : public InputError {
public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Failure inside a processing stage. The stage tag names the pipeline step
/// ("path", "timing", "resolve", ...).
class ProcessingError : public std::runtime_error {
public:
  ProcessingError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

/// A processing stage ran past its deadline.
class TimeoutError : public ProcessingError {
public:
  using ProcessingError::ProcessingError;
};

}  // namespace expressive
