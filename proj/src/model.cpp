#include "ar1/model.hpp"

#include <cmath>

namespace ar1 {

namespace {

void validate(double a, double p, bool experimental) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("p must lie in (0, 1), got " + std::to_string(p));
  if (!(a > 0.0)) throw ValidationError("a must be positive, got " + std::to_string(a));
  const double upper = 2.0 / 3.0;
  if (experimental) {
    if (!(a < 1.0)) throw ValidationError("a must lie in (0, 1), got " + std::to_string(a));
  } else if (a > upper) {
    throw ValidationError("a must lie in (0, 2/3] (use the experimental flag beyond), got " +
                          std::to_string(a));
  }
}

}  // namespace

ModelParams ModelParams::from_double(double a, double p, bool experimental) {
  validate(a, p, experimental);
  ModelParams m;
  m.a = a;
  m.p = p;
  m.q = 1.0 - p;
  m.ceiling = 1.0 / (1.0 - a);
  m.hole_lo = (2.0 * a - 1.0) / (1.0 - a);
  m.experimental = experimental;
  return m;
}

ModelParams ModelParams::from_rational(const Rational& a, double p, bool experimental) {
  if (a <= 0 || a >= 1 || (!experimental && a > Rational(2, 3)))
    throw ValidationError("a must lie in (0, 2/3] (use the experimental flag beyond), got " +
                          to_string(a));
  validate(to_double(a), p, experimental);
  ModelParams m;
  m.a = to_double(a);
  m.p = p;
  m.q = 1.0 - p;
  const Rational one_minus = 1 - a;
  m.ceiling = to_double(Rational(1 / one_minus));
  m.hole_lo = to_double(Rational((2 * a - 1) / one_minus));
  m.a_exact = a;
  m.a_exact->canonicalize();
  m.experimental = experimental;
  return m;
}

bool ModelParams::is_two_thirds() const {
  if (a_exact) return *a_exact == Rational(2, 3);
  return std::abs(a - 2.0 / 3.0) < 1e-15;
}

bool ModelParams::closed_form() const {
  if (a_exact) return *a_exact <= Rational(1, 2);
  return a <= 0.5;
}

}  // namespace ar1
