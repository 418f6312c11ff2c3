#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geolin {

/// Syntax error produced by the expression parser; `offset` is the byte
/// position in the input text.
struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"),
        offset(off) {}
};

/// Evaluation failure: division by zero, ln/sqrt of a non-positive
/// argument, unknown symbol. Strict by design, no NaN propagation.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed system spec document; `path` is a JSON-pointer-like location.
struct SpecError : std::runtime_error {
  std::string path;
  SpecError(const std::string& msg, const std::string& p)
      : std::runtime_error(msg + " [" + p + "]"), path(p) {}
};

/// Numeric failure: singular metric, empty constraint surface,
/// sampling exhaustion, non-monotone time.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace geolin
