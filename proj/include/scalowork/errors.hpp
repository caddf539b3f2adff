#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scalowork {

// Invalid sizes, probabilities, counts passed to an operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates a structural rule (vertex id out of range, bad set).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A protocol step cannot proceed (partition gap, quorum failure, ...).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed bytes or text. `offset` is a byte offset for binary input and a
// 1-based line number for text input.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace scalowork
