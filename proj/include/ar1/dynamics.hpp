#pragma once

// The map T_a, orbits and their digits, return times, domain decompositions
// and reversed-time reconstruction.

#include "ar1/exact.hpp"
#include "ar1/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ar1 {

/// a, hole_lo = (2a-1)/(1-a) and ceiling = 1/(1-a) in the scalar S.
template <class S>
struct MapCoeffs {
  S a;
  S hole_lo;
  S ceiling;
};

template <class S>
MapCoeffs<S> map_coeffs(const S& a) {
  const S one(1);
  const S two(2);
  return {a, S((two * a - one) / (one - a)), S(one / (one - a))};
}

/// T_a(x), or nullopt when x lies in the open hole (hole_lo, 1).
/// The upper branch is tried first, so T_a(1) = 0 for every a (at a = 2/3 as well).
template <class S>
std::optional<S> apply_T(const MapCoeffs<S>& m, const S& x) {
  const S zero(0);
  const S one(1);
  if (x < zero || m.ceiling < x) throw OutOfDomain("apply_T: x = " + to_string(x) + " outside [0, ceiling]");
  if (!(x < one)) return S((x - one) / m.a);
  if (!(m.hole_lo < x)) return S((x + one) / m.a);
  return std::nullopt;
}

/// Floating-point T_a. Points within 1e-12 (relative) of the ceiling are snapped to it.
std::optional<double> apply_T(const ModelParams& params, double x);

enum class OrbitClass { Finite, EventuallyPeriodic, AperiodicUpTo };

std::string to_string(OrbitClass c);

/// Digit data of an orbit, independent of the scalar type of its points.
///
/// `deltas[k]` = 1{T^k(x) < 1} for the stored points. `occ` has one more entry than
/// `deltas`: occ[k] = L_k. For EventuallyPeriodic orbits only the distinct points
/// T^0..T^{k0+period-1} are stored; `delta(k)` and `L(k)` continue periodically.
struct OrbitSummary {
  std::vector<std::uint8_t> deltas;
  std::vector<long> occ{0};
  OrbitClass kind = OrbitClass::AperiodicUpTo;
  std::optional<std::size_t> kappa;        // nullopt: infinite, or not reached within the horizon
  std::optional<std::size_t> kappa_prime;  // nullopt: infinitely many distinct points
  std::size_t k0 = 0;
  std::size_t period = 0;
  bool near_boundary = false;

  std::size_t length() const { return deltas.size(); }
  bool periodic() const { return kind == OrbitClass::EventuallyPeriodic; }
  /// Whether delta(k) is known.
  bool has(std::size_t k) const { return periodic() || k < length(); }
  int delta(std::size_t k) const;
  long L(std::size_t k) const;
  /// Occupation gained over one period (0 unless periodic).
  long cycle_occ() const { return periodic() ? occ[k0 + period] - occ[k0] : 0; }
  /// Index of the stored point equal to T^k(x) (identity unless periodic).
  std::size_t fold(std::size_t k) const;
};

template <class S>
struct Orbit : OrbitSummary {
  S start{};
  std::vector<S> points;

  const S& point(std::size_t k) const { return points[fold(k)]; }
};

namespace detail {

template <class S>
void push_point(Orbit<S>& o, S x) {
  const bool below_one = x < S(1);
  o.deltas.push_back(below_one ? 1 : 0);
  o.occ.push_back(o.occ.back() + (below_one ? 1 : 0));
  o.points.push_back(std::move(x));
}

}  // namespace detail

/// Exact orbit of x under T_a. Stops at the first hole entry (Finite), at the first
/// exact repeat (EventuallyPeriodic, minimal k0), or after max_iter points.
template <ExactField S>
Orbit<S> orbit_exact(const S& a, const S& x, std::size_t max_iter) {
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  const MapCoeffs<S> m = map_coeffs(S(canonical(a)));
  Orbit<S> o;
  S cur = canonical(x);
  o.start = cur;
  std::unordered_map<S, std::size_t, ExactHash> seen;
  for (std::size_t k = 0;; ++k) {
    if (auto it = seen.find(cur); it != seen.end()) {
      o.kind = OrbitClass::EventuallyPeriodic;
      o.k0 = it->second;
      o.period = k - it->second;
      o.kappa_prime = k - 1;
      return o;
    }
    if (m.hole_lo < cur && cur < S(1)) {
      detail::push_point(o, cur);
      o.kind = OrbitClass::Finite;
      o.kappa = k;
      o.kappa_prime = k;
      return o;
    }
    if (k == max_iter) {
      o.kind = OrbitClass::AperiodicUpTo;
      return o;
    }
    seen.emplace(cur, k);
    detail::push_point(o, cur);
    cur = *apply_T(m, cur);
  }
}

template <ExactField S>
Orbit<S> orbit_of_zero(const S& a, std::size_t max_iter = 10000) {
  return orbit_exact(a, S(0), max_iter);
}

/// Exact orbit of zero; requires params.a_exact.
Orbit<Rational> orbit_of_zero(const ModelParams& params, std::size_t max_iter = 10000);

/// Floating-point orbit of x. Exact repeats of a double are reported as periodic;
/// `near_boundary` is set when a point is within 1e-12 of hole_lo or 1.
Orbit<double> orbit_of(const ModelParams& params, double x, std::size_t max_iter = 10000);

inline long floor_int(double x) { return static_cast<long>(std::floor(x)); }

/// Digits floor(beta * y_k + alpha) of the (beta, alpha)-expansion of y,
/// with y_{k+1} = beta * y_k + alpha mod 1. y = 1 is accepted.
template <class S>
std::vector<int> parry_digits(const S& beta, const S& alpha, S y, std::size_t n) {
  std::vector<int> d;
  d.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const S z = beta * y + alpha;
    const long f = floor_int(z);
    d.push_back(static_cast<int>(f));
    y = z - S(f);
  }
  return d;
}

struct ReturnStats {
  std::vector<std::size_t> t{0};    // t[0] = 0, then return times to [0, 1)
  std::optional<std::size_t> sigma;  // nullopt: infinitely many returns or unknown
  std::vector<double> d;             // d_0, d_1, ...
  double C_a = 0.0;                  // min of 1/d_n over n <= sigma and r^{1/t_1}; 0 when p >= 1/2
  double C_freq = 0.0;               // 1/max d_n: the smallest constant the frequency bound allows
};

/// Return times of the orbit of zero and the frequency constants.
/// Throws InsufficientOrbit when C_a needs returns beyond a truncated orbit
/// (only if `need_C_a`; otherwise C_a is left at 0).
ReturnStats return_stats(const OrbitSummary& orbit_zero, const ModelParams& params, bool need_C_a = true);

struct ReversedPath {
  std::vector<double> path;  // X_0 .. X_n
  std::vector<int> xi;       // xi_1 .. xi_n
};

/// The surviving history ending at x_n, for a < 2/3. Points within 1e-9 of
/// hole_lo or 1 are snapped onto them before the branch choice.
/// Throws HoleHit(k) when T^k(x_n) lies in the hole for some k < n.
ReversedPath reversed_recover(const ModelParams& params, double x_n, std::size_t n);

/// History of the unconditioned chain for a < 1/2 via the map G_a.
/// Throws GapHit(k) when G^k(x_n), k < n, lies in the central gap.
ReversedPath reversed_recover_unconditional(const ModelParams& params, double x_n, std::size_t n);

template <class S>
struct Interval {
  S lo;
  S hi;
  bool closed_lo = true;
  bool closed_hi = true;
};

template <class S>
struct IntervalDecomposition {
  std::size_t k = 0;
  std::vector<Interval<S>> intervals;
  std::vector<S> left_endpoints;
  std::vector<S> right_endpoints;

  bool contains(const S& x) const {
    for (const auto& I : intervals) {
      const bool above = I.closed_lo ? !(x < I.lo) : I.lo < x;
      const bool below = I.closed_hi ? !(I.hi < x) : x < I.hi;
      if (above && below) return true;
    }
    return false;
  }
  S total_length() const {
    S s(0);
    for (const auto& I : intervals) s = s + (I.hi - I.lo);
    return s;
  }
};

/// Maximal intervals of {x : kappa(x) >= k}, for 1/2 < a <= 2/3.
///
/// Each piece carries the affine increasing map T^j on it; a piece is split at the
/// preimages of hole_lo and 1 and both parts are pushed one branch forward.
/// At a = 2/3 the lower branch is [0, 1) so pieces there are half-open.
template <class S>
IntervalDecomposition<S> domain_decomposition(const S& a, std::size_t k) {
  const S half = S(1) / S(2);
  if (!(half < a) || S(2) / S(3) < a) throw ValidationError("domain_decomposition needs 1/2 < a <= 2/3");
  if (k < 1) throw ValidationError("domain_decomposition needs k >= 1");
  const MapCoeffs<S> m = map_coeffs(a);
  const bool two_thirds = m.hole_lo == S(1);

  struct Piece {
    Interval<S> dom;
    S img_lo;
    S img_hi;
  };
  // Point of the piece's domain mapped to y.
  auto pullback = [](const Piece& pc, const S& y) -> S {
    if (pc.img_hi == pc.img_lo) return pc.dom.lo;
    return pc.dom.lo + (y - pc.img_lo) * (pc.dom.hi - pc.dom.lo) / (pc.img_hi - pc.img_lo);
  };

  std::vector<Piece> pieces{{{S(0), m.ceiling, true, true}, S(0), m.ceiling}};
  for (std::size_t depth = 0; depth < k; ++depth) {
    std::vector<Piece> next;
    for (const Piece& pc : pieces) {
      // Lower branch part: image within [0, hole_lo] (or [0, 1) at a = 2/3).
      if (pc.img_lo < m.hole_lo || (!two_thirds && pc.img_lo == m.hole_lo)) {
        const S yhi = std::min(pc.img_hi, m.hole_lo);
        Piece q;
        q.dom.lo = pc.dom.lo;
        q.dom.closed_lo = pc.dom.closed_lo;
        q.dom.hi = pullback(pc, yhi);
        if (two_thirds)
          q.dom.closed_hi = pc.img_hi < S(1) ? pc.dom.closed_hi : false;
        else
          q.dom.closed_hi = m.hole_lo < pc.img_hi ? true : pc.dom.closed_hi;
        q.img_lo = S((pc.img_lo + S(1)) / a);
        q.img_hi = S((yhi + S(1)) / a);
        if (q.dom.lo < q.dom.hi || (q.dom.closed_lo && q.dom.closed_hi)) next.push_back(q);
      }
      // Upper branch part: image within [1, ceiling].
      if (!(pc.img_hi < S(1))) {
        const S ylo = std::max(pc.img_lo, S(1));
        Piece q;
        q.dom.lo = pullback(pc, ylo);
        q.dom.closed_lo = pc.img_lo < S(1) ? true : pc.dom.closed_lo;
        q.dom.hi = pc.dom.hi;
        q.dom.closed_hi = pc.dom.closed_hi;
        q.img_lo = S((ylo - S(1)) / a);
        q.img_hi = S((pc.img_hi - S(1)) / a);
        if (q.dom.lo < q.dom.hi || (q.dom.closed_lo && q.dom.closed_hi)) next.push_back(q);
      }
    }
    pieces = std::move(next);
  }
  // Intervals at level k are those where T^0..T^{k-1} avoid the hole; merge touching pieces.
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.dom.lo < y.dom.lo; });
  IntervalDecomposition<S> out;
  out.k = k;
  for (const Piece& pc : pieces) {
    if (!out.intervals.empty()) {
      Interval<S>& last = out.intervals.back();
      if (last.hi == pc.dom.lo && (last.closed_hi || pc.dom.closed_lo)) {
        last.hi = pc.dom.hi;
        last.closed_hi = pc.dom.closed_hi;
        continue;
      }
    }
    out.intervals.push_back(pc.dom);
  }
  for (const auto& I : out.intervals) {
    out.left_endpoints.push_back(I.lo);
    out.right_endpoints.push_back(I.hi);
  }
  return out;
}

}  // namespace ar1
