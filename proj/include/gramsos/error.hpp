#pragma once

#include <stdexcept>
#include <string>

namespace gramsos {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed polynomial / JSON input. Carries a byte offset when known.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  explicit ParseError(const std::string& msg) : Error(msg), pos(0) {}
  std::size_t pos;
};

// Constraint system has no solution (b not in the range of the map).
struct InfeasibleError : Error {
  using Error::Error;
};

}  // namespace gramsos
