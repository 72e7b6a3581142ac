#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heins_lab {

/// A point lies outside (or numerically on the boundary of) its model domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Disk/half-plane tags disagree: a composition, an evaluation or a cast.
class TypeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A primitive parameter violates the constraint that makes it a self-map.
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was asked of a map whose classification does not allow it.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Evaluation produced inf/nan; `path` locates the offending sub-expression.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& path, const std::string& what)
      : std::runtime_error(what + " at " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message,
             std::string expected = {})
      : std::runtime_error(message + " at offset " + std::to_string(offset)),
        offset_(offset),
        message_(message),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }
  /// Short summary of what the parser would have accepted; may be empty.
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string message_;
  std::string expected_;
};

}  // namespace heins_lab
