#include "ar1/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ar1 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHoleEps = 1e-12;

struct Rates {
  double log_pl = 0.0;  // log(p / lambda)
  double log_r = 0.0;   // log(q / p)
  double C = 0.0;
};

Rates rates(const ModelParams& params, double lambda, double C) {
  return {std::log(params.p / lambda), std::log(params.q / params.p), C};
}

// Terms beyond index N satisfy term_k <= A g^{k-N}. For r <= 1 this uses L_k >= L_{N+1};
// for r > 1 the frequency bound L_k - L_{N+1} <= C (k - N) + 1.
struct Geometric {
  double A;
  double g;
};

Geometric tail_geometric(const Rates& rt, std::size_t N, long L_next, int e) {
  const double n = static_cast<double>(N) + e;
  if (rt.log_r <= 0.0) return {std::exp(L_next * rt.log_r + n * rt.log_pl), std::exp(rt.log_pl)};
  return {std::exp((L_next + 1) * rt.log_r + n * rt.log_pl), std::exp(rt.log_pl + rt.C * rt.log_r)};
}

double tail_sum(const Geometric& t) {
  if (t.g >= 1.0) return kInf;
  return t.A * t.g / (1.0 - t.g);
}

// Bound on sum_{k > N} (k + 1) term_k.
double tail_sum_weighted(const Geometric& t, std::size_t N) {
  if (t.g >= 1.0) return kInf;
  const double one_minus = 1.0 - t.g;
  return t.A * ((static_cast<double>(N) + 1.0) * t.g / one_minus + t.g / (one_minus * one_minus));
}

double term(const OrbitSummary& o, const Rates& rt, std::size_t k, int e) {
  return std::exp((static_cast<double>(k) + e) * rt.log_pl + static_cast<double>(o.L(k)) * rt.log_r);
}

// sum_k [delta_k] (p/lambda)^{k+e} r^{L_k}, weighted by (k + 1) when `weighted`.
SeriesValue sum_series(const OrbitSummary& o, const Rates& rt, int e, bool by_delta, bool weighted, double tol) {
  SeriesValue s;
  long double acc = 0.0L;
  auto add = [&](std::size_t k) {
    if (by_delta && !o.delta(k)) return;
    const double w = weighted ? static_cast<double>(k) + 1.0 : 1.0;
    acc += w * term(o, rt, k, e);
  };
  switch (o.kind) {
    case OrbitClass::Finite:
      for (std::size_t k = 0; k < o.length(); ++k) add(k);
      s.truncation = o.length() - 1;
      break;
    case OrbitClass::EventuallyPeriodic: {
      for (std::size_t k = 0; k < o.k0; ++k) add(k);
      const double log_rho = static_cast<double>(o.period) * rt.log_pl + static_cast<double>(o.cycle_occ()) * rt.log_r;
      long double cyc = 0.0L;
      long double cyc_w = 0.0L;
      for (std::size_t k = o.k0; k < o.k0 + o.period; ++k) {
        if (by_delta && !o.delta(k)) continue;
        const double t = term(o, rt, k, e);
        cyc += t;
        cyc_w += (static_cast<double>(k) + 1.0) * t;
      }
      if (cyc > 0.0L) {
        if (log_rho >= 0.0) throw NotSummable("series diverges: the cycle ratio is >= 1");
        const double rho = std::exp(log_rho);
        const double one_minus = -std::expm1(log_rho);
        if (weighted)
          acc += cyc_w / one_minus + cyc * static_cast<double>(o.period) * rho / (one_minus * one_minus);
        else
          acc += cyc / one_minus;
      }
      s.truncation = o.k0 + o.period - 1;
      break;
    }
    case OrbitClass::AperiodicUpTo: {
      if (tail_geometric(rt, 0, 0, e).g >= 1.0)
        throw NotSummable("series diverges: lambda <= p max(1, r^C)");
      double tb = kInf;
      for (std::size_t k = 0; k < o.length(); ++k) {
        add(k);
        const Geometric g = tail_geometric(rt, k, o.occ[k + 1], e);
        tb = weighted ? tail_sum_weighted(g, k) : tail_sum(g);
        s.truncation = k;
        if (tb < tol) break;
      }
      s.tail_bound = tb;
      break;
    }
  }
  s.value = static_cast<double>(acc);
  return s;
}

// +1: R(lambda) > 1, -1: R(lambda) < 1, 0: undecided within the tail.
int sign_of(const ModelParams& params, const OrbitSummary& o, double lambda, double C) {
  try {
    const SeriesValue r = eval_R(params, o, lambda, C);
    if (r.value > 1.0) return 1;
    if (r.value + r.tail_bound < 1.0) return -1;
    return 0;
  } catch (const NotSummable&) {
    return 1;
  }
}

}  // namespace

SeriesValue eval_R(const ModelParams& params, const OrbitSummary& orbit_zero, double lambda, double C, double tol) {
  if (!(lambda > 0.0)) throw ValidationError("eval_R: lambda must be positive");
  return sum_series(orbit_zero, rates(params, lambda, C), 1, true, false, tol);
}

SeriesValue eval_R(const ModelParams& params, const OrbitSummary& orbit_zero, double lambda) {
  return eval_R(params, orbit_zero, lambda, tail_constant(params, orbit_zero));
}

double tail_constant(const ModelParams& params, const OrbitSummary& orbit_zero) {
  if (params.p >= 0.5) return 0.0;
  const ReturnStats st = return_stats(orbit_zero, params, false);
  if (st.t.size() < 2 && orbit_zero.kind == OrbitClass::AperiodicUpTo)
    throw InsufficientOrbit("no return to [0, 1) within the computed orbit; cannot bound the tail");
  return st.C_freq;
}

SpectralSolution solve_lambda(const ModelParams& params, const OrbitSummary& orbit_zero) {
  if (params.closed_form()) {
    SpectralSolution s;
    s.lambda = params.p;
    s.bracket = {params.p, params.p};
    s.c = 1.0;
    s.closed_form = true;
    return s;
  }
  const double C = tail_constant(params, orbit_zero);
  const double m = std::max(1.0, std::pow(params.q / params.p, C));
  return solve_lambda(params, orbit_zero, params.p * m, 2.0 * params.p * m);
}

SpectralSolution solve_lambda(const ModelParams& params, const OrbitSummary& orbit_zero, double lo, double hi) {
  const double C = tail_constant(params, orbit_zero);
  if (sign_of(params, orbit_zero, lo, C) <= 0)
    throw BracketFailure("solve_lambda: R(lo) > 1 could not be certified at lo = " + std::to_string(lo));
  int s_hi = sign_of(params, orbit_zero, hi, C);
  for (int i = 0; i < 64 && s_hi > 0; ++i) {
    lo = hi;
    hi *= 2.0;
    s_hi = sign_of(params, orbit_zero, hi, C);
  }
  if (s_hi >= 0)
    throw BracketFailure("solve_lambda: R(hi) < 1 could not be certified at hi = " + std::to_string(hi) +
                         " (orbit too short?)");

  SpectralSolution sol;
  sol.C = C;
  double lambda = 0.0;
  bool undecided = false;
  int it = 0;
  for (; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const int s = sign_of(params, orbit_zero, mid, C);
    if (s > 0) {
      lo = mid;
    } else if (s < 0) {
      hi = mid;
    } else {
      lambda = mid;
      undecided = true;
      break;
    }
  }
  if (!undecided) lambda = lo + 0.5 * (hi - lo);
  if (undecided && eval_R(params, orbit_zero, lambda, C).tail_bound > 1e-12)
    throw InsufficientOrbit("solve_lambda: the tail of R hides the root within [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]; extend the orbit");
  sol.lambda = lambda;
  sol.bracket = {lo, hi};
  sol.iterations = it;

  const Rates rt = rates(params, lambda, C);
  const SeriesValue r = sum_series(orbit_zero, rt, 1, true, false, kTailTol);
  sol.truncation = r.truncation;
  sol.tail_bound = r.tail_bound;
  const SeriesValue inv_c = sum_series(orbit_zero, rt, 1, true, true, kTailTol);
  sol.c = 1.0 / inv_c.value;
  sol.c_tail_bound = inv_c.tail_bound;
  return sol;
}

SaltusFunction::SaltusFunction(std::vector<double> positions, std::vector<double> weights, double tail_bound)
    : tail_(tail_bound) {
  if (positions.size() != weights.size()) throw DimensionMismatch("SaltusFunction: positions and weights differ in size");
  std::vector<std::size_t> idx(positions.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return positions[i] < positions[j]; });
  const auto n = static_cast<Eigen::Index>(idx.size());
  pos_.resize(n);
  wts_.resize(n);
  cum_.resize(n);
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < n; ++i) {
    pos_(i) = positions[idx[static_cast<std::size_t>(i)]];
    wts_(i) = weights[idx[static_cast<std::size_t>(i)]];
    acc += wts_(i);
    cum_(i) = static_cast<double>(acc);
  }
}

double SaltusFunction::operator()(double x) const {
  const double* b = pos_.data();
  const auto k = std::upper_bound(b, b + pos_.size(), x) - b;
  return k == 0 ? 0.0 : cum_(k - 1);
}

double SaltusFunction::integral(double top) const {
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < pos_.size() && pos_(i) <= top; ++i) acc += wts_(i) * (top - pos_(i));
  return static_cast<double>(acc);
}

SaltusFunction eigenfunction_V(const ModelParams& params, const SpectralSolution& sol, const OrbitSummary& o,
                               const std::vector<double>& points, double tol) {
  if (sol.closed_form) return SaltusFunction({0.0}, {1.0}, 0.0);
  if (points.size() != o.length()) throw DimensionMismatch("eigenfunction_V: points and digits differ in length");
  const Rates rt = rates(params, sol.lambda, sol.C);
  std::vector<double> pos;
  std::vector<double> w;
  double tail = 0.0;
  switch (o.kind) {
    case OrbitClass::Finite:
      for (std::size_t k = 0; k < o.length(); ++k) {
        pos.push_back(points[k]);
        w.push_back(term(o, rt, k, 0));
      }
      break;
    case OrbitClass::EventuallyPeriodic: {
      const double log_rho = static_cast<double>(o.period) * rt.log_pl + static_cast<double>(o.cycle_occ()) * rt.log_r;
      if (log_rho >= 0.0) throw NotSummable("eigenfunction_V: cycle ratio >= 1");
      const double fold = 1.0 / -std::expm1(log_rho);
      for (std::size_t k = 0; k < o.k0 + o.period; ++k) {
        pos.push_back(points[k]);
        w.push_back(term(o, rt, k, 0) * (k >= o.k0 ? fold : 1.0));
      }
      break;
    }
    case OrbitClass::AperiodicUpTo:
      tail = kInf;
      for (std::size_t k = 0; k < o.length(); ++k) {
        pos.push_back(points[k]);
        w.push_back(term(o, rt, k, 0));
        tail = tail_sum(tail_geometric(rt, k, o.occ[k + 1], 0));
        if (tail < tol) break;
      }
      break;
  }
  return SaltusFunction(std::move(pos), std::move(w), tail);
}

double eigen_residual(const ModelParams& params, const SpectralSolution& sol, const SaltusFunction& V,
                      const std::vector<double>& grid) {
  return operator_residual(params, V, sol.lambda, grid);
}

namespace {

struct CdfWalk {
  Rates rt;
  double tol;
  long L = 0;
  long double sum = 0.0L;
  CdfValue out;

  double term_at(std::size_t k) const { return std::exp((static_cast<double>(k) + 1.0) * rt.log_pl + L * rt.log_r); }
  // Bound on the terms after index k, with L = L_{k+1}.
  double tail_after(std::size_t k) const { return tail_sum(tail_geometric(rt, k, L, 1)); }
  void finish(double z) {
    out.z = z;
    out.survival = std::clamp(static_cast<double>(sum), 0.0, 1.0);
    out.cdf = 1.0 - out.survival;
  }
};

CdfValue closed_form_cdf(double z, bool at_ceiling) {
  CdfValue v;
  v.z = z;
  v.survival = at_ceiling ? 0.0 : 1.0;
  v.cdf = 1.0 - v.survival;
  return v;
}

}  // namespace

CdfValue quasi_stationary_cdf(const ModelParams& params, const SpectralSolution& sol, const Rational& z_in, double tol,
                              std::size_t max_iter) {
  if (!params.a_exact) throw ValidationError("quasi_stationary_cdf: a rational z needs an exact coefficient a");
  const MapCoeffs<Rational> m = map_coeffs(*params.a_exact);
  if (z_in < 0) throw OutOfDomain("quasi_stationary_cdf: z < 0");
  const Rational z = z_in > m.ceiling ? m.ceiling : canonical(z_in);
  const double zd = to_double(z);
  if (sol.closed_form) return closed_form_cdf(zd, z == m.ceiling);

  CdfWalk w{rates(params, sol.lambda, sol.C), tol, 0, 0.0L, {}};
  Rational x = z;
  for (std::size_t k = 0;; ++k) {
    w.out.truncation = k;
    if (x == 1) {
      w.sum += w.term_at(k);
      w.out.hits_one = true;
      break;
    }
    if (m.hole_lo < x && x < 1) {
      w.sum += w.term_at(k);
      break;
    }
    if (x < 1) {
      w.sum += w.term_at(k);
      ++w.L;
    }
    const double tb = w.tail_after(k);
    if (tb < tol || k + 1 >= max_iter) {
      w.out.tail_bound = tb;
      break;
    }
    x = *apply_T(m, x);
  }
  w.finish(zd);
  return w.out;
}

CdfValue quasi_stationary_cdf(const ModelParams& params, const SpectralSolution& sol, double z, double tol,
                              std::size_t max_iter) {
  if (!(z >= 0.0)) throw OutOfDomain("quasi_stationary_cdf: z < 0");
  if (params.a_exact) return quasi_stationary_cdf(params, sol, Rational(z), tol, max_iter);
  z = std::min(z, params.ceiling);
  if (sol.closed_form) return closed_form_cdf(z, z >= params.ceiling);

  CdfWalk w{rates(params, sol.lambda, sol.C), tol, 0, 0.0L, {}};
  double x = z;
  double widen = 0.0;
  for (std::size_t k = 0;; ++k) {
    w.out.truncation = k;
    const bool near_one = std::abs(x - 1.0) < kHoleEps;
    const bool near_lo = std::abs(x - params.hole_lo) < kHoleEps;
    if ((near_one || near_lo) && !w.out.near_boundary) {
      // Digits before k are reliable; the rest may belong to either side of the edge.
      w.out.near_boundary = true;
      widen = k == 0 ? 0.0 : 2.0 * w.tail_after(k - 1);
    }
    if (near_one) x = 1.0;
    if (near_lo) x = params.hole_lo;
    if (x == 1.0) {
      w.sum += w.term_at(k);
      w.out.hits_one = true;
      break;
    }
    if (params.in_hole(x)) {
      w.sum += w.term_at(k);
      break;
    }
    if (x < 1.0) {
      w.sum += w.term_at(k);
      ++w.L;
    }
    const double tb = w.tail_after(k);
    if (tb < tol || k + 1 >= max_iter) {
      w.out.tail_bound = tb;
      break;
    }
    x = *apply_T(params, x);
  }
  w.out.tail_bound += widen;
  w.finish(z);
  return w.out;
}

LambdaCurve lambda_curve(double p, const std::vector<Rational>& a_grid, std::size_t max_iter) {
  LambdaCurve curve;
  std::vector<std::uint8_t> prev_digits;
  int plateau = -1;
  for (const Rational& a : a_grid) {
    CurveRow row;
    row.a = a;
    row.a.canonicalize();
    std::vector<std::uint8_t> digits;
    try {
      const ModelParams params = ModelParams::from_rational(row.a, p);
      const auto orbit = orbit_of_zero(params, max_iter);
      row.kappa = orbit.kappa;
      row.kappa_prime = orbit.kappa_prime;
      row.kind = orbit.kind;
      const SpectralSolution sol = solve_lambda(params, orbit);
      row.lambda = sol.lambda;
      row.c = sol.c;
      row.tail_bound = sol.tail_bound;
      if (orbit.kind == OrbitClass::Finite && !sol.closed_form) digits = orbit.deltas;
    } catch (const Error& e) {
      row.error = e.what();
    }
    if (!digits.empty()) {
      if (digits != prev_digits) ++plateau;
      row.plateau = plateau;
    }
    prev_digits = digits;
    curve.rows.push_back(row);
  }
  const CurveRow* last = nullptr;
  for (const CurveRow& r : curve.rows) {
    if (!r.error.empty()) continue;
    if (last) {
      const double drop = last->lambda - r.lambda;
      curve.max_violation = std::max(curve.max_violation, drop);
      if (drop > 2.0 * kMonotoneTol) ++curve.violations;
    }
    last = &r;
  }
  return curve;
}

BoundsReport check_bounds(const ModelParams& params, const SpectralSolution& sol, const ReturnStats& stats) {
  BoundsReport b;
  b.C = params.p < 0.5 ? stats.C_a : 0.0;
  const double m = std::max(1.0, std::pow(params.q / params.p, b.C));
  b.lower = params.p * m;
  b.upper = params.p / params.a * m;
  b.lambda = sol.lambda;
  b.lower_margin = sol.lambda - b.lower;
  b.upper_margin = b.upper - sol.lambda;
  b.equality_expected = params.is_two_thirds() && params.p == 0.5;
  b.upper_equality = std::abs(b.upper_margin) <= 1e-12 * b.upper;
  if (sol.closed_form) {
    b.lower_ok = sol.lambda == params.p;
    b.upper_ok = sol.lambda <= b.upper;
  } else {
    b.lower_ok = b.lower_margin > 0.0;
    b.upper_ok = b.equality_expected ? b.upper_equality : (b.upper_margin > 0.0 && !b.upper_equality);
  }
  b.pass = b.lower_ok && b.upper_ok;
  return b;
}

ParryValue parry_density(const Rational& a, double x, double tol) {
  if (!(a > Rational(1, 2)) || !(a < 1)) throw ValidationError("parry_density needs 1/2 < a < 1");
  const double ad = to_double(a);
  const Rational y = a * Rational(x) / 2;
  const Rational beta = 1 / a;
  const Rational half(1, 2);
  // a^{N+1} / (1 - a) < tol bounds the omitted part of either sum.
  const auto N = static_cast<std::size_t>(std::ceil(std::log(tol * (1.0 - ad)) / std::log(ad)));
  auto step = [&](const Rational& u) {
    Rational v = beta * u + half;
    return Rational(v - floor_int(v));
  };
  Rational u0(0);
  Rational u1(1);
  long double acc = 0.0L;
  double w = ad;
  for (std::size_t k = 0; k < N; ++k) {
    if (u0 <= y) acc += w;
    if (u1 <= y) acc -= w;
    u0 = step(u0);
    u1 = step(u1);
    w *= ad;
  }
  return {static_cast<double>(acc), std::pow(ad, static_cast<double>(N) + 1.0) / (1.0 - ad)};
}

}  // namespace ar1
