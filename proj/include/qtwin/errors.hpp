#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtwin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its domain (non-positive T, zero k, bad mass, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A pulse sequence failed validation.
class InvalidSequence : public Error {
 public:
  using Error::Error;
};

/// The closed-form phase relations only hold for interferometers closed in
/// phase space.
class OpenGeometry : public Error {
 public:
  using Error::Error;
};

/// Closed forms are derived for a linear potential; a gravity gradient is
/// rejected.
class UnsupportedPotential : public Error {
 public:
  using Error::Error;
};

/// Numeric oracle configuration violates its invariants.
class OracleConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical result is non-finite, inconsistent, or outside tolerance.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind {
  syntax,
  non_monotone_times,
  non_finite,
  duplicate_directive,
  invalid_duration,
};

const char* to_string(ParseErrorKind kind) noexcept;

/// Geometry-file parse error with a 1-based source location.
class GeometryParseError : public Error {
 public:
  GeometryParseError(ParseErrorKind kind, std::size_t line, std::size_t column,
                     const std::string& detail);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace qtwin
