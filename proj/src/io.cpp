#include "ar1/io.hpp"

#include <cstdio>

namespace ar1 {

void write_curve_csv(std::ostream& os, const LambdaCurve& curve) {
  os << "a_num,a_den,lambda,kappa,kappa_prime,classification,c,tail_bound,error\n";
  for (const auto& r : curve.rows) {
    os << r.a.get_num().get_str() << ',' << r.a.get_den().get_str() << ',';
    if (!r.error.empty()) {
      std::string msg = r.error;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
      os << ",,,,,," << msg << '\n';
      continue;
    }
    os << to_string(r.lambda) << ',';
    if (r.kappa) os << *r.kappa;
    os << ',';
    if (r.kappa_prime) os << *r.kappa_prime;
    os << ',' << to_string(r.kind) << ',' << to_string(r.c) << ',' << to_string(r.tail_bound) << ",\n";
  }
}

void write_cdf_csv(std::ostream& os, const std::vector<CdfValue>& rows) {
  os << "z,cdf,tail_bound\n";
  for (const auto& r : rows) os << to_string(r.z) << ',' << to_string(r.cdf) << ',' << to_string(r.tail_bound) << '\n';
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << to_string(m(i, j));
    os << '\n';
  }
}

nlohmann::json lumped_json(const LumpedChain& chain) {
  nlohmann::json j;
  j["dim"] = chain.dim;
  j["p"] = chain.p;
  auto& labels = j["states"] = nlohmann::json::object();
  labels["0"] = "absorbed";
  for (std::size_t k = 1; k < chain.dim; ++k)
    labels[std::to_string(k)] = "level set of T^" + std::to_string(k - 1) + "(0) = " + to_string(chain.labels[k]);
  auto& m = j["matrix"] = nlohmann::json::array();
  auto& sym = j["symbolic"] = nlohmann::json::array();
  for (std::size_t i = 0; i < chain.dim; ++i) {
    nlohmann::json row = nlohmann::json::array();
    nlohmann::json srow = nlohmann::json::array();
    for (std::size_t j2 = 0; j2 < chain.dim; ++j2) {
      row.push_back(chain.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)));
      switch (chain.weight(i, j2)) {
        case Weight::none: srow.push_back("0"); break;
        case Weight::p: srow.push_back("p"); break;
        case Weight::q: srow.push_back("1-p"); break;
        case Weight::one: srow.push_back("1"); break;
      }
    }
    m.push_back(row);
    sym.push_back(srow);
  }
  return j;
}

nlohmann::json mc_json(const MCEstimate& e, std::uint64_t seed, const std::string& config_hash) {
  return {{"estimate", e.value},
          {"stderr", e.std_error},
          {"ci95", {e.ci95.first, e.ci95.second}},
          {"reps", e.reps_used},
          {"hits", e.hits},
          {"seed", seed},
          {"config_hash", config_hash}};
}

void write_ecdf_csv(std::ostream& os, const ConditionalCdf& c) {
  os << "z,ecdf\n";
  for (std::size_t i = 0; i < c.z.size(); ++i) os << to_string(c.z[i]) << ',' << to_string(c.ecdf[i]) << '\n';
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunManifest::config_hash() const {
  std::string canon = subcommand + '\n' + tool_version + '\n';
  for (const auto& [k, v] : params) canon += "param " + k + '=' + v + '\n';
  for (const auto& [k, v] : options) canon += "option " + k + '=' + v + '\n';
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  return {{"subcommand", subcommand}, {"params", params},           {"options", options},
          {"output_path", output_path}, {"tool_version", tool_version}, {"config_hash", config_hash()}};
}

}  // namespace ar1
