#pragma once

// Direct simulation of the killed chain: persistence, conditional law, reversed time.

#include "ar1/dynamics.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace ar1 {

struct MCConfig {
  std::uint64_t seed = 1;
  std::size_t reps = 100000;  // attempted paths
  std::size_t horizon = 20;
  double start = 0.0;
  std::size_t chunk = std::size_t{1} << 18;  // paths per RNG stream
  unsigned threads = 0;                      // 0: hardware concurrency
};

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps_used = 0;
  std::size_t hits = 0;
  std::pair<double, double> ci95{0.0, 0.0};  // value +- 1.96 std_error

  /// Wilson score interval for the underlying proportion at normal quantile z.
  std::pair<double, double> wilson(double z) const;
};

/// Innovation source for one chunk. The engine is seeded from (seed, chunk) through
/// std::seed_seq, so each chunk is an independent reproducible stream.
class Stream {
public:
  Stream(std::uint64_t seed, std::uint64_t chunk, double p);
  /// True for xi = +1. Compares 53 random bits with p 2^53; p = 1/2 uses single bits.
  bool up() {
    if (half_) {
      if (left_ == 0) {
        bits_ = eng_();
        left_ = 64;
      }
      --left_;
      const bool b = bits_ & 1U;
      bits_ >>= 1;
      return b;
    }
    return (eng_() >> 11) < threshold_;
  }

private:
  std::mt19937_64 eng_;
  std::uint64_t threshold_ = 0;
  bool half_ = false;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

struct SimPath {
  std::vector<double> path;  // X_0 .. X_m, m = n or tau
  std::vector<int> xi;       // xi_1 .. xi_m
  std::optional<std::size_t> tau;  // nullopt: survived to n
};

/// X_{k+1} = a X_k + xi_{k+1} until step n or the first negative value.
SimPath simulate_path(const ModelParams& params, double x0, std::size_t n, Stream& stream);
/// Same recursion with prescribed innovations.
SimPath simulate_path(const ModelParams& params, double x0, const std::vector<int>& xi);

/// alive[k] = number of paths with tau > k, for k = 0..horizon.
std::vector<std::uint64_t> survival_counts(const ModelParams& params, const MCConfig& cfg);

/// Binomial estimate of P_{x0}(tau > n) from hits out of reps.
MCEstimate binomial_estimate(std::size_t hits, std::size_t reps);

/// P_{x0}(tau > horizon). Throws DegenerateEstimate when nothing survives.
MCEstimate estimate_persistence(const ModelParams& params, const MCConfig& cfg);

struct ConditionalCdf {
  std::vector<double> z;
  std::vector<double> ecdf;       // at z
  std::vector<double> reference;  // at z
  std::vector<double> samples;    // X_n of the survivors, sorted
  std::size_t attempts = 0;
  double ks = 0.0;       // sup distance to the reference over all samples
  double dkw_eps = 0.0;  // DKW half-width at level alpha
  bool within_band = false;
};

/// Empirical law of X_n given tau > n, compared with `reference` (a CDF).
/// Throws DegenerateEstimate when nothing survives.
ConditionalCdf estimate_conditional_cdf(const ModelParams& params, const MCConfig& cfg, const std::vector<double>& z_grid,
                                        const std::function<double(double)>& reference, double alpha = 0.05);

/// Kolmogorov distance between the empirical CDF of sorted samples and `reference`.
double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& reference);

/// DKW half-width sqrt(log(2/alpha) / (2 m)).
double dkw_epsilon(std::size_t m, double alpha);

struct ReversedCheck {
  std::size_t paths = 0;     // surviving paths checked
  std::size_t attempts = 0;  // paths simulated
  double max_error = 0.0;    // max |recovered X_k - simulated X_k|
  std::size_t xi_mismatches = 0;
};

/// Simulates until cfg.reps paths survive to cfg.horizon and reconstructs each from X_n
/// with reversed_recover. Requires a < 2/3.
ReversedCheck check_reversed_time(const ModelParams& params, const MCConfig& cfg);

/// (P(tau > n_hi) / P(tau > n_lo))^{1 / (n_hi - n_lo)} from one set of runs, with
/// delta-method standard error. Uses cfg.horizon = n_hi.
MCEstimate estimate_lambda_ratio(const ModelParams& params, MCConfig cfg, std::size_t n_lo, std::size_t n_hi);

}  // namespace ar1
