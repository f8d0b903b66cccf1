#pragma once

// CSV and JSON writers for orbits, curves, CDF tables, matrices and Monte Carlo results.

#include "ar1/lumped.hpp"
#include "ar1/montecarlo.hpp"
#include "ar1/spectral.hpp"

#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace ar1 {

inline constexpr const char* kToolVersion = "0.1.0";

/// Round-trip decimal form.
inline std::string to_string(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class S>
nlohmann::json orbit_json(const Orbit<S>& o) {
  nlohmann::json j;
  j["start"] = to_string(o.start);
  j["classification"] = to_string(o.kind);
  if (o.kind == OrbitClass::AperiodicUpTo) j["horizon"] = o.length();
  j["kappa"] = o.kappa ? nlohmann::json(*o.kappa) : nlohmann::json(nullptr);
  j["kappa_prime"] = o.kappa_prime ? nlohmann::json(*o.kappa_prime) : nlohmann::json(nullptr);
  if (o.periodic()) {
    j["k0"] = o.k0;
    j["period"] = o.period;
  }
  j["near_boundary"] = o.near_boundary;
  auto& pts = j["points"] = nlohmann::json::array();
  auto& approx = j["points_approx"] = nlohmann::json::array();
  for (const auto& x : o.points) {
    pts.push_back(to_string(x));
    approx.push_back(to_double(x));
  }
  j["deltas"] = o.deltas;
  j["occupation"] = o.occ;
  return j;
}

/// a_num,a_den,lambda,kappa,kappa_prime,classification,c,tail_bound,error
void write_curve_csv(std::ostream& os, const LambdaCurve& curve);

/// z,cdf,tail_bound
void write_cdf_csv(std::ostream& os, const std::vector<CdfValue>& rows);

/// Dense row-major matrix, one row per line.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// Matrix, symbolic entries and state labels.
nlohmann::json lumped_json(const LumpedChain& chain);

/// {estimate, stderr, ci95, reps, seed, config_hash}
nlohmann::json mc_json(const MCEstimate& e, std::uint64_t seed, const std::string& config_hash);

/// z,ecdf
void write_ecdf_csv(std::ostream& os, const ConditionalCdf& c);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& text);

struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> params;
  std::map<std::string, std::string> options;
  std::string output_path;
  std::string tool_version = kToolVersion;

  /// Hex FNV-1a of the subcommand, params, options and tool version.
  std::string config_hash() const;
  nlohmann::json to_json() const;
};

}  // namespace ar1
