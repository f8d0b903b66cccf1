#include "ar1/dynamics.hpp"

#include <cmath>
#include <limits>

namespace ar1 {

namespace {

constexpr double kHoleEps = 1e-12;
constexpr double kSnapEps = 1e-9;
constexpr double kCeilingRel = 1e-12;

bool near_hole_edge(const ModelParams& m, double x) {
  return std::abs(x - m.hole_lo) < kHoleEps || std::abs(x - 1.0) < kHoleEps;
}

void check_domain(const ModelParams& m, double x, const char* who) {
  if (!(x >= 0.0) || x > m.ceiling * (1.0 + kCeilingRel))
    throw OutOfDomain(std::string(who) + ": x = " + std::to_string(x) + " outside [0, ceiling]");
}

}  // namespace

std::string to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::Finite: return "Finite";
    case OrbitClass::EventuallyPeriodic: return "EventuallyPeriodic";
    case OrbitClass::AperiodicUpTo: return "AperiodicUpTo";
  }
  return "?";
}

std::size_t OrbitSummary::fold(std::size_t k) const {
  if (!periodic() || k < k0 + period) return k;
  return k0 + (k - k0) % period;
}

int OrbitSummary::delta(std::size_t k) const { return deltas[fold(k)]; }

long OrbitSummary::L(std::size_t k) const {
  if (!periodic() || k <= k0 + period) return occ[k];
  const std::size_t cycles = (k - k0) / period;
  const std::size_t rem = (k - k0) % period;
  return occ[k0 + rem] + static_cast<long>(cycles) * cycle_occ();
}

std::optional<double> apply_T(const ModelParams& m, double x) {
  check_domain(m, x, "apply_T");
  double y;
  if (x >= 1.0)
    y = (x - 1.0) / m.a;
  else if (x <= m.hole_lo)
    y = (x + 1.0) / m.a;
  else
    return std::nullopt;
  if (std::abs(y - m.ceiling) <= kCeilingRel * m.ceiling) y = m.ceiling;
  return y;
}

Orbit<Rational> orbit_of_zero(const ModelParams& params, std::size_t max_iter) {
  if (!params.a_exact) throw ValidationError("orbit_of_zero needs an exact coefficient a");
  return orbit_exact(*params.a_exact, Rational(0), max_iter);
}

Orbit<double> orbit_of(const ModelParams& params, double x, std::size_t max_iter) {
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  check_domain(params, x, "orbit_of");
  Orbit<double> o;
  o.start = x;
  std::unordered_map<double, std::size_t> seen;
  double cur = std::min(x, params.ceiling);
  for (std::size_t k = 0;; ++k) {
    if (auto it = seen.find(cur); it != seen.end()) {
      o.kind = OrbitClass::EventuallyPeriodic;
      o.k0 = it->second;
      o.period = k - it->second;
      o.kappa_prime = k - 1;
      return o;
    }
    if (near_hole_edge(params, cur)) o.near_boundary = true;
    if (params.in_hole(cur)) {
      detail::push_point(o, cur);
      o.kind = OrbitClass::Finite;
      o.kappa = k;
      o.kappa_prime = k;
      return o;
    }
    if (k == max_iter) return o;
    seen.emplace(cur, k);
    detail::push_point(o, cur);
    cur = *apply_T(params, cur);
  }
}

ReturnStats return_stats(const OrbitSummary& orbit, const ModelParams& params, bool need_C_a) {
  ReturnStats st;
  // Horizon over which returns are known: up to kappa, the stored length, or
  // (periodic) as far as needed.
  std::size_t known = orbit.length();
  if (orbit.kind == OrbitClass::Finite) known = *orbit.kappa + 1;
  const bool cycle_returns = orbit.periodic() && orbit.cycle_occ() > 0;

  auto collect_until = [&](std::size_t count) {
    // Extend t to `count` + 1 entries, or until the known horizon ends.
    for (std::size_t k = st.t.back() + 1; st.t.size() < count + 1; ++k) {
      if (!cycle_returns && k >= known) break;
      if (orbit.delta(k)) st.t.push_back(k);
    }
  };
  for (std::size_t k = 1; k < known; ++k)
    if (orbit.delta(k)) st.t.push_back(k);
  if (orbit.kind == OrbitClass::Finite || (orbit.periodic() && !cycle_returns))
    st.sigma = st.t.size() - 1;

  const std::size_t n_ret = st.t.size() - 1;
  if (n_ret == 0) return st;

  const double r = params.q / params.p;
  const double t1 = static_cast<double>(st.t[1]);
  std::size_t n_needed = n_ret;
  if (params.p < 0.5) n_needed = static_cast<std::size_t>(std::floor(std::pow(r, 1.0 / t1)));
  if (st.sigma) n_needed = std::min(n_needed, *st.sigma);
  // d_n for n < sigma uses t_{n+1}.
  collect_until(n_needed + 1);

  auto d_of = [&](std::size_t n) -> std::optional<double> {
    if (n == 0) return t1;
    if (n + 1 >= st.t.size() && !(st.sigma && n == *st.sigma)) return std::nullopt;
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= n; ++i) v = std::min(v, (static_cast<double>(st.t[i]) + 1.0) / static_cast<double>(i));
    if (!(st.sigma && n == *st.sigma)) v = std::min(v, static_cast<double>(st.t[n + 1]) / static_cast<double>(n + 1));
    return v;
  };

  double dmax = 0.0;
  for (std::size_t n = 0;; ++n) {
    auto d = d_of(n);
    if (!d) break;
    st.d.push_back(*d);
    dmax = std::max(dmax, *d);
    if (st.sigma && n == *st.sigma) break;
  }
  st.C_freq = 1.0 / dmax;

  if (params.p < 0.5 && need_C_a) {
    if (n_needed >= st.d.size())
      throw InsufficientOrbit("return_stats: C_a needs d_" + std::to_string(n_needed) +
                              " but the orbit only determines " + std::to_string(st.d.size()) + " values");
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n <= n_needed; ++n) c = std::min(c, 1.0 / st.d[n]);
    st.C_a = c;
  }
  return st;
}

ReversedPath reversed_recover(const ModelParams& params, double x_n, std::size_t n) {
  if (params.is_two_thirds() || params.a >= 2.0 / 3.0)
    throw ValidationError("reversed_recover needs a < 2/3");
  check_domain(params, x_n, "reversed_recover");
  ReversedPath out;
  out.path.assign(n + 1, 0.0);
  out.xi.assign(n, 0);
  double x = std::min(x_n, params.ceiling);
  out.path[n] = x;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(x - 1.0) < kSnapEps) x = 1.0;
    if (std::abs(x - params.hole_lo) < kSnapEps) x = params.hole_lo;
    if (x >= 1.0) {
      out.xi[n - k - 1] = 1;
      x = (x - 1.0) / params.a;
    } else if (x <= params.hole_lo) {
      out.xi[n - k - 1] = -1;
      x = (x + 1.0) / params.a;
    } else {
      throw HoleHit(k, "reversed_recover: T^" + std::to_string(k) + "(x_n) lies in the hole");
    }
    x = std::min(x, params.ceiling);
    out.path[n - k - 1] = x;
  }
  return out;
}

ReversedPath reversed_recover_unconditional(const ModelParams& params, double x_n, std::size_t n) {
  if (!(params.a < 0.5)) throw ValidationError("reversed_recover_unconditional needs a < 1/2");
  const double gap = (1.0 - 2.0 * params.a) / (1.0 - params.a);
  if (std::abs(x_n) > params.ceiling * (1.0 + kCeilingRel))
    throw OutOfDomain("reversed_recover_unconditional: |x_n| exceeds the ceiling");
  ReversedPath out;
  out.path.assign(n + 1, 0.0);
  out.xi.assign(n, 0);
  double x = x_n;
  out.path[n] = x;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(std::abs(x) - gap) < kSnapEps) x = std::copysign(gap, x);
    if (x >= gap) {
      out.xi[n - k - 1] = 1;
      x = (x - 1.0) / params.a;
    } else if (x <= -gap) {
      out.xi[n - k - 1] = -1;
      x = (x + 1.0) / params.a;
    } else {
      throw GapHit(k, "reversed_recover_unconditional: G^" + std::to_string(k) + "(x_n) lies in the gap");
    }
    out.path[n - k - 1] = x;
  }
  return out;
}

}  // namespace ar1
