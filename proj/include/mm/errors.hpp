#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mm {

// Input text could not be parsed; `position` is a 0-based offset into the input.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// An operation was called outside its stated domain (zero polynomial where a
// nonzero one is required, parameter out of range, inequality gate violated).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine could not produce a trustworthy result (degenerate
// quadrature fibers, enumeration budget exhausted, eigensolver failure).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mm
