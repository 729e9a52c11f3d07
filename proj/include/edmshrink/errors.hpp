#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edmshrink {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of a binary operation have different sizes.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix failed a structural check (symmetry, hollowness, PSD, EDM membership).
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// Operation undefined for its argument (e.g. relative error against a zero matrix).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or argument. `line()` is 0 when not tied to a line.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {
inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "edmshrink warning: " << msg << '\n';
  };
  return handler;
}
}  // namespace detail

/// Replaces the sink for non-fatal warnings (default: stderr). Returns the previous one.
/// Not synchronized; install once at startup.
inline WarningHandler set_warning_handler(WarningHandler handler) {
  auto previous = std::move(detail::warning_handler());
  detail::warning_handler() = std::move(handler);
  return previous;
}

inline void warn(std::string_view msg) {
  if (auto& h = detail::warning_handler()) h(msg);
}

}  // namespace edmshrink
