#include "ar1/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace ar1 {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::size_t chunk_count(const MCConfig& cfg) {
  if (cfg.reps == 0) throw ValidationError("MCConfig: reps must be >= 1");
  if (cfg.chunk == 0) throw ValidationError("MCConfig: chunk must be >= 1");
  return (cfg.reps + cfg.chunk - 1) / cfg.chunk;
}

std::size_t chunk_reps(const MCConfig& cfg, std::size_t c) {
  return std::min(cfg.chunk, cfg.reps - c * cfg.chunk);
}

// Runs work(c) for every chunk c and returns the results in chunk order.
template <class F>
auto run_chunks(const MCConfig& cfg, std::size_t n, F work) {
  using R = decltype(work(std::size_t{0}));
  std::vector<R> out(n);
  unsigned threads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t c = 0; c < n; ++c) out[c] = work(c);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < n; c = next++) out[c] = work(c);
    });
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace

std::pair<double, double> MCEstimate::wilson(double z) const {
  if (reps_used == 0) return {0.0, 1.0};
  const double n = static_cast<double>(reps_used);
  const double ph = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = (ph + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Stream::Stream(std::uint64_t seed, std::uint64_t chunk, double p) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  eng_.seed(seq);
  half_ = p == 0.5;
  threshold_ = static_cast<std::uint64_t>(std::llround(std::ldexp(p, 53)));
}

SimPath simulate_path(const ModelParams& params, double x0, std::size_t n, Stream& stream) {
  SimPath s;
  s.path.reserve(n + 1);
  s.path.push_back(x0);
  if (x0 < 0.0) {
    s.tau = 0;
    return s;
  }
  double x = x0;
  for (std::size_t k = 1; k <= n; ++k) {
    const int xi = stream.up() ? 1 : -1;
    x = params.a * x + xi;
    s.xi.push_back(xi);
    s.path.push_back(x);
    if (x < 0.0) {
      s.tau = k;
      break;
    }
  }
  return s;
}

SimPath simulate_path(const ModelParams& params, double x0, const std::vector<int>& xi) {
  SimPath s;
  s.path.push_back(x0);
  if (x0 < 0.0) {
    s.tau = 0;
    return s;
  }
  double x = x0;
  for (std::size_t k = 1; k <= xi.size(); ++k) {
    x = params.a * x + xi[k - 1];
    s.xi.push_back(xi[k - 1]);
    s.path.push_back(x);
    if (x < 0.0) {
      s.tau = k;
      break;
    }
  }
  return s;
}

std::vector<std::uint64_t> survival_counts(const ModelParams& params, const MCConfig& cfg) {
  const std::size_t n = chunk_count(cfg);
  const std::size_t H = cfg.horizon;
  auto per_chunk = run_chunks(cfg, n, [&](std::size_t c) {
    // died[k]: paths with tau = k
    std::vector<std::uint64_t> died(H + 2, 0);
    Stream st(cfg.seed, c, params.p);
    const std::size_t m = chunk_reps(cfg, c);
    const double a = params.a;
    for (std::size_t r = 0; r < m; ++r) {
      double x = cfg.start;
      std::size_t k = 0;
      if (x < 0.0) {
        ++died[0];
        continue;
      }
      for (k = 1; k <= H; ++k) {
        x = a * x + (st.up() ? 1.0 : -1.0);
        if (x < 0.0) break;
      }
      ++died[k];  // k = H + 1 means survived
    }
    return died;
  });
  std::vector<std::uint64_t> died(H + 2, 0);
  for (const auto& d : per_chunk)
    for (std::size_t k = 0; k < d.size(); ++k) died[k] += d[k];
  std::vector<std::uint64_t> alive(H + 1, 0);
  std::uint64_t remaining = cfg.reps;
  for (std::size_t k = 0; k <= H; ++k) {
    remaining -= died[k];
    alive[k] = remaining;
  }
  return alive;
}

MCEstimate binomial_estimate(std::size_t hits, std::size_t reps) {
  MCEstimate e;
  e.reps_used = reps;
  e.hits = hits;
  e.value = static_cast<double>(hits) / static_cast<double>(reps);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(reps));
  e.ci95 = {e.value - kZ95 * e.std_error, e.value + kZ95 * e.std_error};
  return e;
}

MCEstimate estimate_persistence(const ModelParams& params, const MCConfig& cfg) {
  const auto alive = survival_counts(params, cfg);
  if (alive.back() == 0)
    throw DegenerateEstimate("estimate_persistence: no path survived " + std::to_string(cfg.horizon) +
                             " steps; increase reps or reduce the horizon");
  return binomial_estimate(alive.back(), cfg.reps);
}

double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& reference) {
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = reference(sorted[i]);
    d = std::max({d, F - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - F});
  }
  return d;
}

double dkw_epsilon(std::size_t m, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(m)));
}

ConditionalCdf estimate_conditional_cdf(const ModelParams& params, const MCConfig& cfg, const std::vector<double>& z_grid,
                                        const std::function<double(double)>& reference, double alpha) {
  const std::size_t n = chunk_count(cfg);
  const std::size_t H = cfg.horizon;
  auto per_chunk = run_chunks(cfg, n, [&](std::size_t c) {
    std::vector<double> out;
    Stream st(cfg.seed, c, params.p);
    const std::size_t m = chunk_reps(cfg, c);
    const double a = params.a;
    for (std::size_t r = 0; r < m; ++r) {
      double x = cfg.start;
      bool alive = x >= 0.0;
      for (std::size_t k = 1; k <= H && alive; ++k) {
        x = a * x + (st.up() ? 1.0 : -1.0);
        alive = x >= 0.0;
      }
      if (alive) out.push_back(x);
    }
    return out;
  });
  ConditionalCdf res;
  res.attempts = cfg.reps;
  for (const auto& v : per_chunk) res.samples.insert(res.samples.end(), v.begin(), v.end());
  if (res.samples.empty())
    throw DegenerateEstimate("estimate_conditional_cdf: no path survived " + std::to_string(H) + " steps");
  std::sort(res.samples.begin(), res.samples.end());
  const double m = static_cast<double>(res.samples.size());
  for (double z : z_grid) {
    res.z.push_back(z);
    const auto k = std::upper_bound(res.samples.begin(), res.samples.end(), z) - res.samples.begin();
    res.ecdf.push_back(static_cast<double>(k) / m);
    res.reference.push_back(reference(z));
  }
  res.ks = ks_distance(res.samples, reference);
  res.dkw_eps = dkw_epsilon(res.samples.size(), alpha);
  res.within_band = res.ks <= res.dkw_eps;
  return res;
}

ReversedCheck check_reversed_time(const ModelParams& params, const MCConfig& cfg) {
  if (params.is_two_thirds() || params.a >= 2.0 / 3.0)
    throw ValidationError("check_reversed_time: the reversed-time identity needs a < 2/3");
  ReversedCheck out;
  const std::size_t H = cfg.horizon;
  for (std::uint64_t c = 0; out.paths < cfg.reps; ++c) {
    Stream st(cfg.seed, c, params.p);
    for (std::size_t r = 0; r < cfg.chunk && out.paths < cfg.reps; ++r) {
      ++out.attempts;
      const SimPath sim = simulate_path(params, cfg.start, H, st);
      if (sim.tau) continue;
      ++out.paths;
      const ReversedPath rec = reversed_recover(params, sim.path.back(), H);
      for (std::size_t k = 0; k <= H; ++k) out.max_error = std::max(out.max_error, std::abs(rec.path[k] - sim.path[k]));
      for (std::size_t k = 0; k < H; ++k)
        if (rec.xi[k] != sim.xi[k]) ++out.xi_mismatches;
    }
    if (out.paths == 0 && c >= 1000)
      throw DegenerateEstimate("check_reversed_time: no path survived " + std::to_string(H) + " steps");
  }
  return out;
}

MCEstimate estimate_lambda_ratio(const ModelParams& params, MCConfig cfg, std::size_t n_lo, std::size_t n_hi) {
  if (n_hi < n_lo + 5) throw ValidationError("estimate_lambda_ratio: needs n_hi - n_lo >= 5");
  cfg.horizon = n_hi;
  const auto alive = survival_counts(params, cfg);
  if (alive[n_hi] == 0)
    throw DegenerateEstimate("estimate_lambda_ratio: no path survived " + std::to_string(n_hi) + " steps");
  const double R = static_cast<double>(cfg.reps);
  const double p_lo = static_cast<double>(alive[n_lo]) / R;
  const double p_hi = static_cast<double>(alive[n_hi]) / R;
  const double dn = static_cast<double>(n_hi - n_lo);
  MCEstimate e;
  e.reps_used = cfg.reps;
  e.hits = alive[n_hi];
  e.value = std::exp(std::log(p_hi / p_lo) / dn);
  // Survivors at n_hi are a subset of those at n_lo.
  const double var_log = std::max(0.0, 1.0 / (R * p_hi) - 1.0 / (R * p_lo));
  e.std_error = e.value * std::sqrt(var_log) / dn;
  e.ci95 = {e.value - kZ95 * e.std_error, e.value + kZ95 * e.std_error};
  return e;
}

}  // namespace ar1
