// ar1: command-line front end.
//
//   ar1 orbit    --a 63/100 [--x 0] [--max-iter N]
//   ar1 lambda   --p 0.5 (--a 2/3 | --a-grid 0.501:0.667:500)
//   ar1 cdf      --a 2/3 --p 0.5 --grid 0:3:300
//   ar1 lumped   --a 63/100 --p 0.5 [--format csv|json]
//   ar1 validate --a 63/100 --p 0.5 --n 20 --reps 1000000 --seed 7
//
// Exit status: 0 success, 2 invalid input, 3 numeric failure.

#include "ar1/io.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using ar1::Rational;

struct Common {
  std::string a;
  std::string p = "0.5";
  bool inexact = false;
  bool experimental = false;
  std::size_t max_iter = 10000;
  std::string out;
};

bool looks_decimal(const std::string& s) { return s.find_first_of(".eE") != std::string::npos; }

double parse_p(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ar1::ValidationError("--p: not a number: " + s);
  return v;
}

ar1::ModelParams make_params(const Common& c) {
  if (c.a.empty()) throw ar1::ValidationError("--a is required");
  const double p = parse_p(c.p);
  if (looks_decimal(c.a)) {
    if (!c.inexact) throw ar1::ValidationError("--a " + c.a + ": give a as num/den, or pass --inexact for a decimal");
    return ar1::ModelParams::from_double(ar1::to_double(ar1::parse_rational(c.a)), p, c.experimental);
  }
  return ar1::ModelParams::from_rational(ar1::parse_rational(c.a), p, c.experimental);
}

// lo:hi:count with count points including both ends.
std::vector<Rational> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ar1::ValidationError("grid must be lo:hi:count, got " + text);
  const Rational lo = ar1::parse_rational(parts[0]);
  const Rational hi = ar1::parse_rational(parts[1]);
  const long count = std::stol(parts[2]);
  if (count < 1 || hi < lo) throw ar1::ValidationError("grid needs count >= 1 and lo <= hi: " + text);
  std::vector<Rational> g;
  for (long i = 0; i < count; ++i)
    g.emplace_back(count == 1 ? lo : Rational(lo + (hi - lo) * Rational(i, count - 1)));
  return g;
}

void emit(const std::string& text, ar1::RunManifest m, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw ar1::ValidationError("cannot write " + out);
  f << text;
  m.output_path = out;
  std::ofstream mf(out + ".manifest.json");
  mf << m.to_json().dump(2) << '\n';
}

ar1::RunManifest manifest(const std::string& cmd, const Common& c) {
  ar1::RunManifest m;
  m.subcommand = cmd;
  if (!c.a.empty()) m.params["a"] = c.a;
  m.params["p"] = c.p;
  m.options["inexact"] = c.inexact ? "1" : "0";
  m.options["experimental"] = c.experimental ? "1" : "0";
  m.options["max_iter"] = std::to_string(c.max_iter);
  return m;
}

void common_options(CLI::App* sub, Common& c, bool need_p) {
  sub->add_option("--a", c.a, "AR coefficient as num/den (decimals need --inexact)");
  auto* p = sub->add_option("--p", c.p, "probability of the +1 innovation");
  if (need_p) p->required();
  sub->add_flag("--inexact", c.inexact, "accept a decimal --a and use floating-point orbits");
  sub->add_flag("--experimental", c.experimental, "allow 2/3 < a < 1");
  sub->add_option("--max-iter", c.max_iter, "orbit horizon");
  sub->add_option("--out", c.out, "output file (a manifest is written next to it)");
}

struct OrbitOf {
  std::unique_ptr<ar1::Orbit<Rational>> exact;
  std::unique_ptr<ar1::Orbit<double>> inexact;
  const ar1::OrbitSummary& summary() const {
    return exact ? static_cast<const ar1::OrbitSummary&>(*exact) : *inexact;
  }
};

OrbitOf zero_orbit(const ar1::ModelParams& params, std::size_t max_iter) {
  OrbitOf o;
  if (params.a_exact)
    o.exact = std::make_unique<ar1::Orbit<Rational>>(ar1::orbit_of_zero(params, max_iter));
  else
    o.inexact = std::make_unique<ar1::Orbit<double>>(ar1::orbit_of(params, 0.0, max_iter));
  return o;
}

ar1::CurveRow curve_row(const ar1::ModelParams& params, const Common& c) {
  ar1::CurveRow row;
  row.a = ar1::parse_rational(c.a);
  const auto o = zero_orbit(params, c.max_iter);
  const auto& s = o.summary();
  row.kappa = s.kappa;
  row.kappa_prime = s.kappa_prime;
  row.kind = s.kind;
  const auto sol = ar1::solve_lambda(params, s);
  row.lambda = sol.lambda;
  row.c = sol.c;
  row.tail_bound = sol.tail_bound;
  return row;
}

int run_orbit(const Common& c, const std::string& x) {
  const auto params = make_params(c);
  nlohmann::json j;
  if (params.a_exact) {
    const Rational x0 = x.empty() ? Rational(0) : ar1::parse_rational(x);
    j = ar1::orbit_json(ar1::orbit_exact(*params.a_exact, x0, c.max_iter));
  } else {
    j = ar1::orbit_json(ar1::orbit_of(params, x.empty() ? 0.0 : parse_p(x), c.max_iter));
  }
  j["a"] = c.a;
  auto m = manifest("orbit", c);
  m.options["x"] = x.empty() ? "0" : x;
  emit(j.dump(2) + "\n", m, c.out);
  return 0;
}

int run_lambda(const Common& c, const std::string& grid) {
  if (c.a.empty() == grid.empty()) throw ar1::ValidationError("lambda: give exactly one of --a and --a-grid");
  ar1::LambdaCurve curve;
  auto m = manifest("lambda", c);
  if (!grid.empty()) {
    m.options["a_grid"] = grid;
    curve = ar1::lambda_curve(parse_p(c.p), parse_grid(grid), c.max_iter);
    if (curve.violations)
      std::cerr << "warning: " << curve.violations << " monotonicity violations, max " << curve.max_violation << '\n';
  } else {
    const auto params = make_params(c);
    if (params.closed_form()) std::cerr << "note: closed form a <= 1/2, lambda = p\n";
    curve.rows.push_back(curve_row(params, c));
  }
  std::ostringstream os;
  ar1::write_curve_csv(os, curve);
  emit(os.str(), m, c.out);
  return 0;
}

int run_cdf(const Common& c, const std::string& grid) {
  const auto params = make_params(c);
  const auto o = zero_orbit(params, c.max_iter);
  const auto sol = ar1::solve_lambda(params, o.summary());
  std::vector<ar1::CdfValue> rows;
  for (const Rational& z : parse_grid(grid)) {
    if (params.a_exact)
      rows.push_back(ar1::quasi_stationary_cdf(params, sol, z));
    else
      rows.push_back(ar1::quasi_stationary_cdf(params, sol, ar1::to_double(z)));
    if (rows.back().near_boundary) std::cerr << "warning: orbit of z = " << ar1::to_string(z) << " passes near a hole edge\n";
  }
  std::ostringstream os;
  ar1::write_cdf_csv(os, rows);
  auto m = manifest("cdf", c);
  m.options["grid"] = grid;
  emit(os.str(), m, c.out);
  return 0;
}

int run_lumped(const Common& c, const std::string& format) {
  const auto params = make_params(c);
  const auto o = zero_orbit(params, c.max_iter);
  const auto chain = o.exact ? ar1::build_lumped(*params.a_exact, params.p, *o.exact)
                             : ar1::build_lumped(params.a, params.p, *o.inexact);
  std::ostringstream os;
  if (format == "json")
    os << ar1::lumped_json(chain).dump(2) << '\n';
  else
    ar1::write_matrix_csv(os, chain.matrix);
  auto m = manifest("lumped", c);
  m.options["format"] = format;
  emit(os.str(), m, c.out);
  return 0;
}

int run_validate(const Common& c, const ar1::MCConfig& cfg) {
  const auto params = make_params(c);
  auto m = manifest("validate", c);
  m.options["n"] = std::to_string(cfg.horizon);
  m.options["reps"] = std::to_string(cfg.reps);
  m.options["seed"] = std::to_string(cfg.seed);
  m.options["chunk"] = std::to_string(cfg.chunk);
  if (cfg.horizon < 10) throw ar1::ValidationError("validate: --n must be >= 10");

  const auto o = zero_orbit(params, c.max_iter);
  const auto sol = ar1::solve_lambda(params, o.summary());
  nlohmann::json rep;
  rep["analytic"] = {{"lambda", sol.lambda}, {"tail_bound", sol.tail_bound}, {"c", sol.c}};
  bool pass = true;

  std::optional<double> exact_surv;
  if (o.summary().kind != ar1::OrbitClass::AperiodicUpTo) {
    const auto chain = o.exact ? ar1::build_lumped(*params.a_exact, params.p, *o.exact)
                               : ar1::build_lumped(params.a, params.p, *o.inexact);
    const auto pf = ar1::leading_eigen(chain.transient_block());
    const double ratio = ar1::persistence_ratio(chain, 60);
    exact_surv = ar1::persistence_via_matrix(chain, cfg.horizon);
    const bool ok = std::abs(pf.lambda - sol.lambda) < 1e-8;
    rep["matrix"] = {{"lambda", pf.lambda},
                     {"power_ratio_60", ratio},
                     {"persistence_n", *exact_surv},
                     {"tolerance", 1e-8},
                     {"pass", ok}};
    pass = pass && ok;
  } else {
    rep["matrix"] = nullptr;
  }

  const std::string hash = m.config_hash();
  const auto alive = ar1::survival_counts(params, cfg);
  const auto surv = ar1::binomial_estimate(alive[cfg.horizon], cfg.reps);
  auto js = ar1::mc_json(surv, cfg.seed, hash);
  if (exact_surv) {
    const bool ok = std::abs(surv.value - *exact_surv) <= 3.0 * surv.std_error;
    js["reference"] = *exact_surv;
    js["pass"] = ok;
    pass = pass && ok;
  }
  rep["mc_persistence"] = js;

  try {
    const auto e = ar1::estimate_lambda_ratio(params, cfg, cfg.horizon / 2, cfg.horizon);
    auto jl = ar1::mc_json(e, cfg.seed, hash);
    const bool ok = std::abs(e.value - sol.lambda) <= 3.0 * e.std_error;
    jl["pass"] = ok;
    rep["mc_lambda_ratio"] = jl;
    pass = pass && ok;
  } catch (const ar1::DegenerateEstimate& err) {
    rep["mc_lambda_ratio"] = {{"error", err.what()}, {"pass", false}};
    pass = false;
  }
  rep["pass"] = pass;
  rep["config_hash"] = hash;
  emit(rep.dump(2) + "\n", m, c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence exponent, eigenfunction and quasi-stationary law of AR(1) with +-1 innovations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ar1::kToolVersion);

  Common c;
  std::string x, a_grid, z_grid, format = "csv";
  ar1::MCConfig cfg;
  cfg.reps = 1000000;

  auto* orbit = app.add_subcommand("orbit", "orbit of 0 (or of --x) under T_a, as JSON");
  common_options(orbit, c, false);
  orbit->add_option("--x", x, "starting point");

  auto* lambda = app.add_subcommand("lambda", "lambda_a as CSV, for one a or a grid");
  common_options(lambda, c, true);
  lambda->add_option("--a-grid", a_grid, "lo:hi:count (exact decimal endpoints)");

  auto* cdf = app.add_subcommand("cdf", "quasi-stationary CDF on a z grid, as CSV");
  common_options(cdf, c, true);
  cdf->add_option("--grid", z_grid, "lo:hi:count")->required();

  auto* lumped = app.add_subcommand("lumped", "lumped transition matrix");
  common_options(lumped, c, true);
  lumped->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* validate = app.add_subcommand("validate", "analytic vs matrix vs Monte Carlo report, as JSON");
  common_options(validate, c, true);
  validate->add_option("--n", cfg.horizon, "horizon");
  validate->add_option("--reps", cfg.reps, "simulated paths");
  validate->add_option("--seed", cfg.seed, "RNG seed");
  validate->add_option("--chunk", cfg.chunk, "paths per RNG stream");
  validate->add_option("--threads", cfg.threads, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*orbit) return run_orbit(c, x);
    if (*lambda) return run_lambda(c, a_grid);
    if (*cdf) return run_cdf(c, z_grid);
    if (*lumped) return run_lumped(c, format);
    if (*validate) return run_validate(c, cfg);
  } catch (const ar1::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ar1::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
