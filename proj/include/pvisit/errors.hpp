#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pvisit {

// Argument and precondition violations are reported with std::invalid_argument.

/// A computation would exceed a hard size guard (path enumeration, DP length).
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration or input file failed schema validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ball has zero estimated measure and cannot be used as a target.
class EmptyBallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An orbit of a dissipative map left the configured escape radius.
class EscapedBasinError : public std::runtime_error {
 public:
  EscapedBasinError(const std::string& what, std::uint64_t step)
      : std::runtime_error(what + " (escape at step " + std::to_string(step) + ")"),
        step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

}  // namespace pvisit
