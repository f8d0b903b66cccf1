#pragma once

#include "ar1/exact.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ar1 {

/// Base of all library errors. `code()` is the CLI exit status class.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input (bad parameters, out-of-domain points). CLI exit status 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A numeric procedure could not produce a certified answer. CLI exit status 3.
class NumericError : public Error {
public:
  using Error::Error;
};

class OutOfDomain : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// The k-th iterate of a reversed path entered the hole.
class HoleHit : public ValidationError {
public:
  HoleHit(std::size_t k, const std::string& what) : ValidationError(what), index(k) {}
  std::size_t index;
};

/// An iterate of the unconditional reversed map fell into the central gap.
class GapHit : public ValidationError {
public:
  GapHit(std::size_t k, const std::string& what) : ValidationError(what), index(k) {}
  std::size_t index;
};

class InfiniteOrbit : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class DimensionMismatch : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class InsufficientOrbit : public NumericError {
public:
  using NumericError::NumericError;
};

class NotSummable : public NumericError {
public:
  using NumericError::NumericError;
};

class BracketFailure : public NumericError {
public:
  using NumericError::NumericError;
};

class NoConvergence : public NumericError {
public:
  using NumericError::NumericError;
};

class DegenerateEstimate : public NumericError {
public:
  using NumericError::NumericError;
};

/// Parameters of X_{n+1} = a X_n + xi_{n+1} with P(xi = +1) = p, P(xi = -1) = q.
///
/// `a_exact` is set when the coefficient is known exactly; orbit classification
/// requires it. The hole is the open interval (hole_lo, 1), empty at a = 2/3.
struct ModelParams {
  double a = 0.0;
  double p = 0.5;
  double q = 0.5;
  double ceiling = 2.0;
  double hole_lo = 0.0;
  std::optional<Rational> a_exact;
  bool experimental = false;

  /// Validates 0 < a <= 2/3 (or < 1 with `experimental`) and 0 < p < 1.
  static ModelParams from_double(double a, double p, bool experimental = false);
  static ModelParams from_rational(const Rational& a, double p, bool experimental = false);

  bool in_hole(double x) const { return hole_lo < x && x < 1.0; }
  bool is_two_thirds() const;
  /// a <= 1/2, where lambda_a = p.
  bool closed_form() const;
  /// q / p, the ratio that weights each visit to [0, 1).
  double ratio() const { return q / p; }
};

}  // namespace ar1
