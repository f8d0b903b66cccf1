#pragma once

// The eigenvalue equation R_a(lambda) = 1, the eigenfunction V, the constant c,
// the quasi-stationary CDF and the bounds on lambda_a.

#include "ar1/dynamics.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ar1 {

/// A truncated series with a certified bound on the omitted remainder.
struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
  std::size_t truncation = 0;  // index of the last term summed
};

struct SpectralSolution {
  double lambda = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int iterations = 0;
  std::size_t truncation = 0;
  double tail_bound = 0.0;
  double c = 1.0;
  double c_tail_bound = 0.0;  // bound on the omitted part of 1/c
  double C = 0.0;             // frequency constant used by the tails
  bool closed_form = false;   // a <= 1/2: lambda = p
};

/// Default truncation tolerance for every certified tail.
inline constexpr double kTailTol = 1e-13;

/// R_a(lambda) = sum_k delta_k (p/lambda)^{k+1} (q/p)^{L_k}.
/// `C` is a frequency constant valid for the orbit (see ReturnStats::C_freq).
/// Throws NotSummable when lambda <= p max(1, (q/p)^C) on an infinite orbit.
SeriesValue eval_R(const ModelParams& params, const OrbitSummary& orbit_zero, double lambda, double C,
                   double tol = kTailTol);
/// As above with C taken from return_stats.
SeriesValue eval_R(const ModelParams& params, const OrbitSummary& orbit_zero, double lambda);

/// Frequency constant used for tails: C_freq when p < 1/2, else 0.
double tail_constant(const ModelParams& params, const OrbitSummary& orbit_zero);

/// Bisection for R_a(lambda) = 1 on [p m, 2 p m], m = max(1, (q/p)^C), with C = tail_constant.
/// The bracket depends on the digits only, so equal digit data gives bit-identical lambda.
/// Throws BracketFailure when the sign change cannot be certified.
SpectralSolution solve_lambda(const ModelParams& params, const OrbitSummary& orbit_zero);
/// Bisection started from a caller-supplied bracket.
SpectralSolution solve_lambda(const ModelParams& params, const OrbitSummary& orbit_zero, double lo, double hi);

/// f(x) = sum_k w_k 1{x >= s_k}: a non-decreasing step function.
class SaltusFunction {
public:
  SaltusFunction() = default;
  SaltusFunction(std::vector<double> positions, std::vector<double> weights, double tail_bound);

  double operator()(double x) const;
  /// Exact integral over [0, top].
  double integral(double top) const;
  double tail_bound() const { return tail_; }
  const Eigen::VectorXd& positions() const { return pos_; }
  const Eigen::VectorXd& cumulative() const { return cum_; }

private:
  Eigen::VectorXd pos_;  // sorted
  Eigen::VectorXd wts_;  // aligned with pos_
  Eigen::VectorXd cum_;  // cum_(i) = sum of wts_(0..i)
  double tail_ = 0.0;
};

/// V(x) = sum_k (p/lambda)^k (q/p)^{L_k} 1{T^k(0) <= x}, with periodic cycles resummed.
SaltusFunction eigenfunction_V(const ModelParams& params, const SpectralSolution& sol, const OrbitSummary& orbit_zero,
                               const std::vector<double>& points, double tol = kTailTol);

template <class S>
SaltusFunction eigenfunction_V(const ModelParams& params, const SpectralSolution& sol, const Orbit<S>& orbit_zero,
                               double tol = kTailTol) {
  std::vector<double> pts;
  pts.reserve(orbit_zero.points.size());
  for (const auto& x : orbit_zero.points) pts.push_back(to_double(x));
  return eigenfunction_V(params, sol, orbit_zero, pts, tol);
}

template <class S>
double eval_V(const ModelParams& params, const SpectralSolution& sol, const Orbit<S>& orbit_zero, double x) {
  return eigenfunction_V(params, sol, orbit_zero)(x);
}

/// (P f)(x) = p f(ax + 1) + q f(ax - 1) 1{x >= 1/a}: the killed transition operator.
template <class F>
double killed_operator(const ModelParams& params, const F& f, double x) {
  double v = params.p * f(params.a * x + 1.0);
  if (x * params.a >= 1.0) v += params.q * f(params.a * x - 1.0);
  return v;
}

/// max over the grid of |(P f)(x) - lambda f(x)|.
template <class F>
double operator_residual(const ModelParams& params, const F& f, double lambda, const std::vector<double>& grid) {
  double worst = 0.0;
  for (double x : grid) worst = std::max(worst, std::abs(killed_operator(params, f, x) - lambda * f(x)));
  return worst;
}

/// Residual of V: max |p V(ax+1) + q V(ax-1) 1{x >= 1/a} - lambda V(x)|.
double eigen_residual(const ModelParams& params, const SpectralSolution& sol, const SaltusFunction& V,
                      const std::vector<double>& grid);

struct CdfValue {
  double z = 0.0;
  double survival = 1.0;
  double cdf = 0.0;
  std::size_t truncation = 0;
  double tail_bound = 0.0;
  bool near_boundary = false;  // the orbit of z passed within 1e-12 of a hole edge
  bool hits_one = false;       // closed form used
};

/// The quasi-stationary CDF at z. Uses the exact orbit of z when params.a_exact is set,
/// floating point otherwise.
CdfValue quasi_stationary_cdf(const ModelParams& params, const SpectralSolution& sol, double z,
                              double tol = kTailTol, std::size_t max_iter = 20000);
/// Exact orbit of a rational z; requires params.a_exact.
CdfValue quasi_stationary_cdf(const ModelParams& params, const SpectralSolution& sol, const Rational& z,
                              double tol = kTailTol, std::size_t max_iter = 20000);

struct CurveRow {
  Rational a;
  double lambda = 0.0;
  std::optional<std::size_t> kappa;
  std::optional<std::size_t> kappa_prime;
  OrbitClass kind = OrbitClass::AperiodicUpTo;
  double c = 0.0;
  double tail_bound = 0.0;
  int plateau = -1;   // rows sharing finite digit data get the same id
  std::string error;  // non-empty when the point failed
};

struct LambdaCurve {
  std::vector<CurveRow> rows;
  double max_violation = 0.0;  // largest decrease of lambda between consecutive rows
  std::size_t violations = 0;  // decreases larger than 2 * kMonotoneTol
};

inline constexpr double kMonotoneTol = 1e-10;

/// lambda_a over a sorted grid of rational a, with monotonicity and plateau reporting.
LambdaCurve lambda_curve(double p, const std::vector<Rational>& a_grid, std::size_t max_iter = 10000);

struct BoundsReport {
  double C = 0.0;
  double lower = 0.0;  // p max(1, r^C)
  double upper = 0.0;  // (p/a) max(1, r^C)
  double lambda = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  bool upper_equality = false;  // lambda = upper within 1e-12
  bool equality_expected = false;
  bool pass = false;
  double lower_margin = 0.0;
  double upper_margin = 0.0;
};

/// Checks p max(1, r^C) < lambda <= (p/a) max(1, r^C) with C = stats.C_a (0 when p >= 1/2);
/// the upper inequality must be strict unless a = 2/3 and p = 1/2.
BoundsReport check_bounds(const ModelParams& params, const SpectralSolution& sol, const ReturnStats& stats);

struct ParryValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// Invariant density of y -> y/a + 1/2 mod 1 at y = a x / 2, as the difference of the
/// saltus sums over the orbits of 0 and 1. Not normalised.
ParryValue parry_density(const Rational& a, double x, double tol = kTailTol);

/// Parry density on [0, 3] for a = 2/3.
inline ParryValue parry_density(double x) { return parry_density(Rational(2, 3), x); }

}  // namespace ar1
