#include "doctest.h"

#include "ar1/io.hpp"

#include <sstream>

using ar1::ModelParams;
using ar1::Rational;

TEST_CASE("fnv1a64 reference values") {
  CHECK(ar1::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(ar1::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(ar1::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("manifest hash covers inputs") {
  ar1::RunManifest m;
  m.subcommand = "lambda";
  m.params["a"] = "2/3";
  m.params["p"] = "0.5";
  const auto h = m.config_hash();
  CHECK(h.size() == 16);
  m.output_path = "x.csv";
  CHECK(m.config_hash() == h);
  m.params["p"] = "0.4";
  CHECK(m.config_hash() != h);
  const auto j = m.to_json();
  CHECK(j["config_hash"] == m.config_hash());
  CHECK(j["params"]["a"] == "2/3");
}

TEST_CASE("orbit JSON") {
  const auto params = ModelParams::from_rational(Rational(63, 100), 0.5);
  const auto j = ar1::orbit_json(ar1::orbit_of_zero(params));
  CHECK(j["classification"] == "Finite");
  CHECK(j["kappa"] == 2);
  CHECK(j["points"][1] == "100/63");
  CHECK(j["deltas"] == nlohmann::json::array({1, 0, 1}));
}

TEST_CASE("curve and CDF CSV") {
  const auto curve = ar1::lambda_curve(0.5, {Rational(63, 100), Rational(3, 4)});
  std::ostringstream os;
  ar1::write_curve_csv(os, curve);
  std::istringstream is(os.str());
  std::string header, row1, row2;
  std::getline(is, header);
  std::getline(is, row1);
  std::getline(is, row2);
  CHECK(header == "a_num,a_den,lambda,kappa,kappa_prime,classification,c,tail_bound,error");
  CHECK(row1.rfind("63,100,0.73278", 0) == 0);
  CHECK(row1.find(",2,2,Finite,") != std::string::npos);
  CHECK(row2.rfind("3,4,,,,,,", 0) == 0);

  std::ostringstream cs;
  ar1::CdfValue v;
  v.z = 1.5;
  v.cdf = 0.5;
  ar1::write_cdf_csv(cs, {v});
  CHECK(cs.str() == "z,cdf,tail_bound\n1.5,0.5,0\n");
}

TEST_CASE("lumped dumps") {
  const auto params = ModelParams::from_rational(Rational(63, 100), 0.5);
  const auto chain = ar1::build_lumped(params, ar1::orbit_of_zero(params));
  std::ostringstream os;
  ar1::write_matrix_csv(os, chain.matrix);
  CHECK(os.str() == "1,0,0,0\n0.5,0,0,0.5\n0,0.5,0.5,0\n0.5,0,0.5,0\n");
  const auto j = ar1::lumped_json(chain);
  CHECK(j["states"]["0"] == "absorbed");
  CHECK(j["symbolic"][1] == nlohmann::json::array({"1-p", "0", "0", "p"}));
}

TEST_CASE("MC JSON") {
  const auto e = ar1::binomial_estimate(25, 100);
  const auto j = ar1::mc_json(e, 7, "abc");
  CHECK(j["estimate"] == 0.25);
  CHECK(j["reps"] == 100);
  CHECK(j["seed"] == 7);
  CHECK(j["config_hash"] == "abc");
  CHECK(j["ci95"].size() == 2);
}
