#pragma once

#include <stdexcept>
#include <string>

namespace ecve {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Matrix or parameter dimensions violate a precondition (q > p, shape mismatch, ...).
class InvalidDimension : public Error {
public:
  using Error::Error;
};

/// Input basis is (numerically) rank deficient.
class DegenerateBasis : public Error {
public:
  using Error::Error;
};

/// Data cannot support the requested computation (constant columns, n too small).
class DegenerateData : public Error {
public:
  using Error::Error;
};

class InvalidConfig : public Error {
public:
  using Error::Error;
};

/// A response transform was applied outside its domain (Box-Cox on nonpositive values).
class DomainError : public Error {
public:
  using Error::Error;
};

class ContractViolation : public Error {
public:
  using Error::Error;
};

class UnsupportedKernel : public Error {
public:
  using Error::Error;
};

class EmptyComplement : public Error {
public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based row/column location when known.
class ParseError : public Error {
public:
  ParseError(const std::string &what, long row = -1, long column = -1)
      : Error(what), row_(row), column_(column) {}

  long row() const noexcept { return row_; }
  long column() const noexcept { return column_; }

private:
  long row_;
  long column_;
};

/// Bad command-line usage; the CLI maps this to exit status 2.
class UsageError : public Error {
public:
  using Error::Error;
};

} // namespace ecve
