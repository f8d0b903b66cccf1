#include "ar1/lumped.hpp"

#include <cmath>

namespace ar1 {

namespace detail {

LumpedChain assemble_lumped(double p, std::vector<std::size_t> up, std::vector<std::size_t> down,
                            std::vector<double> labels) {
  LumpedChain c;
  c.dim = up.size();
  c.p = p;
  c.q = 1.0 - p;
  c.up = std::move(up);
  c.down = std::move(down);
  c.labels = std::move(labels);
  const auto d = static_cast<Eigen::Index>(c.dim);
  c.matrix = Eigen::MatrixXd::Zero(d, d);
  c.matrix(0, 0) = 1.0;
  for (std::size_t s = 1; s < c.dim; ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    c.matrix(i, static_cast<Eigen::Index>(c.up[s])) += c.p;
    c.matrix(i, static_cast<Eigen::Index>(c.down[s])) += c.q;
  }
  return c;
}

}  // namespace detail

Weight LumpedChain::weight(std::size_t i, std::size_t j) const {
  if (i == 0) return j == 0 ? Weight::one : Weight::none;
  if (up[i] == j && down[i] == j) return Weight::one;
  if (up[i] == j) return Weight::p;
  if (down[i] == j) return Weight::q;
  return Weight::none;
}

LumpedChain build_lumped(const ModelParams& params, const Orbit<Rational>& orbit_zero) {
  if (!params.a_exact) throw ValidationError("build_lumped: needs an exact coefficient a");
  return build_lumped(*params.a_exact, params.p, orbit_zero);
}

PerronFrobenius leading_eigen(const Eigen::MatrixXd& block, double tol, std::size_t max_iter) {
  if (block.rows() != block.cols() || block.rows() == 0)
    throw DimensionMismatch("leading_eigen: block must be square and non-empty");
  if ((block.array() < 0.0).any()) throw ValidationError("leading_eigen: block has negative entries");

  auto iterate = [&](const auto& M, Eigen::VectorXd& x, std::size_t& its) {
    const auto n = M.rows();
    x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    for (its = 1; its <= max_iter; ++its) {
      Eigen::VectorXd y = M * x;
      const double norm = y.lpNorm<1>();
      if (norm == 0.0) throw NoConvergence("leading_eigen: iterate vanished (nilpotent block)");
      y /= norm;
      const double change = (y - x).lpNorm<1>();
      const bool done = std::abs(norm - est) < tol && change < tol;
      x = std::move(y);
      est = norm;
      if (done) return est;
    }
    throw NoConvergence("leading_eigen: no convergence after " + std::to_string(max_iter) +
                        " iterations (reducible or periodic block?)");
  };

  PerronFrobenius pf;
  std::size_t its_r = 0;
  std::size_t its_l = 0;
  pf.lambda = iterate(block, pf.right, its_r);
  iterate(block.transpose(), pf.left, its_l);
  pf.iterations = std::max(its_r, its_l);
  return pf;
}

double persistence_via_matrix(const LumpedChain& chain, std::size_t n) {
  const Eigen::MatrixXd B = chain.transient_block();
  Eigen::VectorXd f = Eigen::VectorXd::Ones(B.rows());
  for (std::size_t k = 0; k < n; ++k) f = B * f;
  return f(0);
}

double persistence_ratio(const LumpedChain& chain, std::size_t n) {
  const Eigen::MatrixXd B = chain.transient_block();
  Eigen::VectorXd f = Eigen::VectorXd::Ones(B.rows());
  // Rescale each step so large n does not underflow.
  for (std::size_t k = 0; k < n; ++k) {
    f = B * f;
    f /= f.lpNorm<Eigen::Infinity>();
  }
  const Eigen::VectorXd g = B * f;
  return g(0) / f(0);
}

Eigen::VectorXd survival_from_left(const LumpedChain& chain, const Eigen::VectorXd& left) {
  const auto n = static_cast<Eigen::Index>(chain.dim - 1);
  if (left.size() != n) throw DimensionMismatch("survival_from_left: vector size differs from the block");
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = chain.labels[static_cast<std::size_t>(k) + 1];
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (chain.labels[static_cast<std::size_t>(j) + 1] >= x) s += left(j);
    out(k) = s;
  }
  return out / out(0);
}

OperatorA make_operator_A(const ModelParams& params, const OrbitSummary& o, std::size_t truncation) {
  OperatorA op;
  op.p = params.p;
  op.q = params.q;
  switch (o.kind) {
    case OrbitClass::Finite:
      op.deltas = o.deltas;
      break;
    case OrbitClass::EventuallyPeriodic:
      op.deltas.assign(o.deltas.begin(), o.deltas.begin() + static_cast<std::ptrdiff_t>(o.k0 + o.period));
      op.k0 = o.k0;
      break;
    case OrbitClass::AperiodicUpTo:
      if (truncation + 1 > o.length())
        throw InsufficientOrbit("make_operator_A: truncation exceeds the computed orbit");
      op.deltas.assign(o.deltas.begin(), o.deltas.begin() + static_cast<std::ptrdiff_t>(truncation + 1));
      break;
  }
  return op;
}

Eigen::VectorXd apply_A(const OperatorA& op, const Eigen::VectorXd& u) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  if (u.size() != d) throw DimensionMismatch("apply_A: vector size differs from the operator");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  double head = 0.0;
  for (Eigen::Index k = 0; k < d; ++k)
    if (op.deltas[static_cast<std::size_t>(k)]) head += u(k);
  out(0) = op.p * head;
  for (Eigen::Index k = 1; k < d; ++k) out(k) = op.c(static_cast<std::size_t>(k - 1)) * u(k - 1);
  if (op.k0) out(static_cast<Eigen::Index>(*op.k0)) += op.c(op.dim() - 1) * u(d - 1);
  return out;
}

Eigen::VectorXd eigenvector_v(const OperatorA& op, double lambda) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  const double pl = op.p / lambda;
  const double r = op.q / op.p;
  Eigen::VectorXd v(d);
  double w = 1.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    v(k) = w;
    w *= op.deltas[static_cast<std::size_t>(k)] ? pl * r : pl;
  }
  if (op.k0) {
    // w is now the weight of the first repeated index; rho is one period's factor.
    const double rho = w / v(static_cast<Eigen::Index>(*op.k0));
    v.tail(d - static_cast<Eigen::Index>(*op.k0)) /= 1.0 - rho;
  }
  return v;
}

Eigen::VectorXd eigenvector_v_star(const OperatorA& op, double lambda) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  const double pl = op.p / lambda;
  const double r = op.q / op.p;
  // v*_k = alpha_k + beta_k v*_{k+1}
  auto alpha = [&](Eigen::Index k) { return op.deltas[static_cast<std::size_t>(k)] ? pl : 0.0; };
  auto beta = [&](Eigen::Index k) { return op.deltas[static_cast<std::size_t>(k)] ? pl * r : pl; };
  double next = 0.0;
  if (op.k0) {
    // Compose the cycle maps to solve v*_{k0} = A + B v*_{k0}.
    double A = 0.0;
    double B = 1.0;
    for (Eigen::Index k = d - 1; k >= static_cast<Eigen::Index>(*op.k0); --k) {
      A = alpha(k) + beta(k) * A;
      B = beta(k) * B;
    }
    next = A / (1.0 - B);
  }
  Eigen::VectorXd vs(d);
  for (Eigen::Index k = d - 1; k >= 0; --k) {
    vs(k) = alpha(k) + beta(k) * next;
    next = vs(k);
  }
  return vs;
}

Eigen::VectorXd fold_M(const OperatorA& op, const Eigen::VectorXd& u) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  if (!op.k0) {
    if (u.size() < d) throw DimensionMismatch("fold_M: vector shorter than the operator");
    return u.head(d);
  }
  const auto k0 = static_cast<Eigen::Index>(*op.k0);
  const Eigen::Index P = d - k0;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < u.size(); ++k) out(k < k0 ? k : k0 + (k - k0) % P) += u(k);
  return out;
}

ConvergenceProbe power_convergence_probe(const OperatorA& op, double lambda, const Eigen::VectorXd& u,
                                         std::size_t n_max) {
  const Eigen::VectorXd v = eigenvector_v(op, lambda);
  const Eigen::VectorXd vs = eigenvector_v_star(op, lambda);
  const Eigen::VectorXd limit = (u.dot(vs) / v.dot(vs)) * v;
  ConvergenceProbe probe;
  Eigen::VectorXd x = u;
  for (std::size_t n = 0; n <= n_max; ++n) {
    probe.deviations.push_back((x - limit).lpNorm<1>());
    x = apply_A(op, x) / lambda;
  }
  // Least squares on log deviations above the roundoff floor.
  const double floor = 1e-13 * std::max(1.0, u.lpNorm<1>());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double m = 0.0;
  for (std::size_t n = 0; n < probe.deviations.size(); ++n) {
    if (probe.deviations[n] <= floor) continue;
    const double x_n = static_cast<double>(n);
    const double y_n = std::log(probe.deviations[n]);
    sx += x_n;
    sy += y_n;
    sxx += x_n * x_n;
    sxy += x_n * y_n;
    m += 1.0;
  }
  const double den = m * sxx - sx * sx;
  probe.gamma = m >= 2.0 && den > 0.0 ? std::exp((m * sxy - sx * sy) / den) : 0.0;
  return probe;
}

}  // namespace ar1
