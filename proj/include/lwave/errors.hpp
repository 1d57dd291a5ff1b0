#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lwave {

/// Argument outside the mathematical domain of an operation (filter order, grid extent, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent scheme or simulation configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A run would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t required_bytes, std::uint64_t available_bytes)
      : std::runtime_error(what), required_(required_bytes), available_(available_bytes) {}

  std::uint64_t required_bytes() const { return required_; }
  std::uint64_t available_bytes() const { return available_; }

 private:
  std::uint64_t required_;
  std::uint64_t available_;
};

/// Not enough samples (frames, ridge points, peaks) for an estimate.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed history file; offset is the byte position where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace lwave
