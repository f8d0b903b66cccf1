#pragma once

// Exact scalar types used for orbit classification.
//
// Rational is GMP's mpq_class. QuadSurd is an element r + s*sqrt(d) of a real
// quadratic field Q(sqrt(d)); it covers the quadratic-irrational parameters
// (e.g. the golden-ratio conjugate) at which the orbit of zero is periodic.

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace ar1 {

using Rational = mpq_class;

/// Parses "num/den", an integer, or a finite decimal ("0.63", "-1.5e-2")
/// into an exact rational in lowest terms. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// "num/den", or "num" when den == 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

/// Largest integer <= q.
long floor_int(const Rational& q);

std::size_t hash_value(const Rational& q);

/// Copy in lowest terms.
inline Rational canonical(Rational q) {
  q.canonicalize();
  return q;
}

/// r + s * sqrt(d) with d > 1 square-free, or a plain rational when s == 0.
class QuadSurd {
public:
  QuadSurd() = default;
  QuadSurd(long v) : r_(v) {}  // NOLINT: implicit like mpq_class
  QuadSurd(Rational r) : r_(std::move(r)) {}  // NOLINT
  QuadSurd(Rational r, Rational s, long d);

  const Rational& rational_part() const { return r_; }
  const Rational& surd_part() const { return s_; }
  long radicand() const { return d_; }
  bool is_rational() const { return s_ == 0; }

  /// -1, 0 or +1, decided exactly.
  int sign() const;
  double to_double() const;

  QuadSurd& operator+=(const QuadSurd& o);
  QuadSurd& operator-=(const QuadSurd& o);
  QuadSurd& operator*=(const QuadSurd& o);
  QuadSurd& operator/=(const QuadSurd& o);
  QuadSurd operator-() const;

  friend QuadSurd operator+(QuadSurd a, const QuadSurd& b) { return a += b; }
  friend QuadSurd operator-(QuadSurd a, const QuadSurd& b) { return a -= b; }
  friend QuadSurd operator*(QuadSurd a, const QuadSurd& b) { return a *= b; }
  friend QuadSurd operator/(QuadSurd a, const QuadSurd& b) { return a /= b; }

  friend bool operator==(const QuadSurd& a, const QuadSurd& b) {
    return a.r_ == b.r_ && a.s_ == b.s_ && (a.s_ == 0 || a.d_ == b.d_);
  }
  friend std::strong_ordering operator<=>(const QuadSurd& a, const QuadSurd& b) {
    const int s = (a - b).sign();
    return s < 0 ? std::strong_ordering::less
                 : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

private:
  void adopt_radicand(const QuadSurd& o);
  void normalize() {
    r_.canonicalize();
    s_.canonicalize();
    if (s_ == 0) d_ = 0;
  }

  Rational r_{0};
  Rational s_{0};
  long d_ = 0;
};

std::string to_string(const QuadSurd& x);
double to_double(const QuadSurd& x);
long floor_int(const QuadSurd& x);
std::size_t hash_value(const QuadSurd& x);

inline double to_double(double x) { return x; }

/// Scalars with exact field arithmetic and exact comparisons.
template <class S>
concept ExactField = requires(const S& a, const S& b) {
  { a + b } -> std::convertible_to<S>;
  { a - b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { a / b } -> std::convertible_to<S>;
  { a < b } -> std::convertible_to<bool>;
  { a == b } -> std::convertible_to<bool>;
  { hash_value(a) } -> std::convertible_to<std::size_t>;
  { to_string(a) } -> std::convertible_to<std::string>;
  { to_double(a) } -> std::convertible_to<double>;
};

inline const QuadSurd& canonical(const QuadSurd& x) { return x; }

struct ExactHash {
  template <class S>
  std::size_t operator()(const S& x) const { return hash_value(x); }
};

}  // namespace ar1
