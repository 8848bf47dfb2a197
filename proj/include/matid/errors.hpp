#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace matid {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live over different fields.
class FieldMismatch : public Error {
 public:
  using Error::Error;
};

/// An operation's documented precondition does not hold for its input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (monomials, permutations, search space) was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Malformed text or document; `offset` is a byte position in the input
/// when one is meaningful.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what), offset_(npos) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace matid
