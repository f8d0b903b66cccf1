#pragma once

// The lumped chain on the level sets of V, its Perron-Frobenius data, and the
// shift-type operator A acting on coefficient sequences.

#include "ar1/dynamics.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ar1 {

/// Symbolic matrix entry.
enum class Weight : std::uint8_t { none, p, q, one };

/// Chain on {0, 1, ..., kappa' + 1}. State 0 is absorbing; state k + 1 is the level
/// set of V containing T^k(0).
struct LumpedChain {
  std::size_t dim = 0;
  double p = 0.5;
  double q = 0.5;
  std::vector<std::size_t> up;    // up[s]: successor of transient s after +1
  std::vector<std::size_t> down;  // down[s]: successor after -1 (0 when killed)
  std::vector<double> labels;     // labels[s] = T^{s-1}(0) for s >= 1
  Eigen::MatrixXd matrix;

  Weight weight(std::size_t i, std::size_t j) const;
  /// Entry (i, j) with the probability of +1 set to `p`.
  template <class Scalar>
  Scalar entry(std::size_t i, std::size_t j, const Scalar& p) const {
    switch (weight(i, j)) {
      case Weight::p: return p;
      case Weight::q: return Scalar(1) - p;
      case Weight::one: return Scalar(1);
      default: return Scalar(0);
    }
  }
  /// Rows and columns 1..dim-1.
  Eigen::MatrixXd transient_block() const { return matrix.bottomRightCorner(dim - 1, dim - 1); }
};

namespace detail {

LumpedChain assemble_lumped(double p, std::vector<std::size_t> up, std::vector<std::size_t> down,
                            std::vector<double> labels);

template <class S>
std::size_t level_state(const std::vector<S>& pts, const S& y) {
  if (y < S(0)) return 0;
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (!(y < pts[j]) && (!best || pts[*best] < pts[j])) best = j;
  return *best + 1;
}

}  // namespace detail

/// Lumped chain for an orbit of 0 with finitely many distinct points. A successor value
/// y >= 0 goes to 1 + the index of the greatest orbit point <= y; y < 0 goes to 0.
/// Throws InfiniteOrbit for AperiodicUpTo orbits.
template <class S>
LumpedChain build_lumped(const S& a, double p, const Orbit<S>& orbit_zero) {
  if (orbit_zero.kind == OrbitClass::AperiodicUpTo)
    throw InfiniteOrbit("build_lumped: the orbit of 0 has no finite number of distinct points");
  const auto& pts = orbit_zero.points;
  const std::size_t n = pts.size();
  std::vector<std::size_t> up(n + 1, 0);
  std::vector<std::size_t> down(n + 1, 0);
  std::vector<double> labels(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    up[k + 1] = detail::level_state(pts, S(a * pts[k] + S(1)));
    down[k + 1] = detail::level_state(pts, S(a * pts[k] - S(1)));
    labels[k + 1] = to_double(pts[k]);
  }
  return detail::assemble_lumped(p, std::move(up), std::move(down), std::move(labels));
}

/// Uses params.a_exact.
LumpedChain build_lumped(const ModelParams& params, const Orbit<Rational>& orbit_zero);

struct PerronFrobenius {
  double lambda = 0.0;
  Eigen::VectorXd right;  // unit l1 norm
  Eigen::VectorXd left;   // unit l1 norm
  std::size_t iterations = 0;
};

inline constexpr double kPowerTol = 1e-13;
inline constexpr std::size_t kPowerMaxIter = 1000000;

/// Power iteration from the all-ones vector until successive eigenvalue estimates and
/// iterates change by less than `tol`. Throws NoConvergence after `max_iter` steps.
PerronFrobenius leading_eigen(const Eigen::MatrixXd& block, double tol = kPowerTol,
                              std::size_t max_iter = kPowerMaxIter);

/// P_0(tau > n) = (B^n 1)_1 with B the transient block.
double persistence_via_matrix(const LumpedChain& chain, std::size_t n);

/// Same recursion in an arbitrary scalar type (exact with Rational).
template <class Scalar>
Scalar persistence_exact(const LumpedChain& chain, const Scalar& p, std::size_t n) {
  const Scalar q = Scalar(1) - p;
  std::vector<Scalar> f(chain.dim, Scalar(1));
  f[0] = Scalar(0);
  std::vector<Scalar> g(chain.dim, Scalar(0));
  for (std::size_t step = 0; step < n; ++step) {
    for (std::size_t s = 1; s < chain.dim; ++s) g[s] = p * f[chain.up[s]] + q * f[chain.down[s]];
    std::swap(f, g);
  }
  return f[1];
}

/// The ratio P_0(tau > n + 1) / P_0(tau > n).
double persistence_ratio(const LumpedChain& chain, std::size_t n);

/// F-bar at the orbit points, T^k(0) -> nu([T^k(0), ceiling]), from the left PF vector.
Eigen::VectorXd survival_from_left(const LumpedChain& chain, const Eigen::VectorXd& left);

/// (Au)_0 = p sum_k delta_k u_k, (Au)_k = c_{k-1} u_{k-1} with c_k = q delta_k + p (1 - delta_k).
/// With `k0` set this is the folded operator A-hat: c_{d-1} u_{d-1} is added at k0.
struct OperatorA {
  std::vector<std::uint8_t> deltas;
  double p = 0.5;
  double q = 0.5;
  std::optional<std::size_t> k0;

  std::size_t dim() const { return deltas.size(); }
  double c(std::size_t k) const { return deltas[k] ? q : p; }
};

/// A on the kappa' + 1 coordinates of the orbit of 0 (A-hat when periodic), or on the
/// first `truncation` + 1 coordinates of an aperiodic orbit.
OperatorA make_operator_A(const ModelParams& params, const OrbitSummary& orbit_zero, std::size_t truncation = 0);

/// Throws DimensionMismatch when u has the wrong size.
Eigen::VectorXd apply_A(const OperatorA& op, const Eigen::VectorXd& u);

/// v_k = (p/lambda)^k (q/p)^{L_k}, folded by M for A-hat.
Eigen::VectorXd eigenvector_v(const OperatorA& op, double lambda);

/// v*_k = sum_{n >= k} delta_n (p/lambda)^{n-k+1} (q/p)^{L_n - L_k}, continued periodically
/// for A-hat and cut at the last coordinate otherwise.
Eigen::VectorXd eigenvector_v_star(const OperatorA& op, double lambda);

/// (Mu)_k = sum_m u_{k + m P} for k0 <= k < k0 + P, identity below k0.
Eigen::VectorXd fold_M(const OperatorA& op, const Eigen::VectorXd& u);

struct ConvergenceProbe {
  std::vector<double> deviations;  // ||lambda^{-n} A^n u - ((u, v*)/(v, v*)) v||_1, n = 0..n_max
  double gamma = 0.0;              // exp of the fitted slope of log deviations
};

/// Empirical geometric rate of lambda^{-n} A^n u towards its limit along v.
ConvergenceProbe power_convergence_probe(const OperatorA& op, double lambda, const Eigen::VectorXd& u,
                                         std::size_t n_max);

}  // namespace ar1
