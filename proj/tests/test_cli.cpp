#include "doctest.h"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int status;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(AR1_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int st = pclose(pipe);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string line(const std::string& text, int k) {
  std::istringstream is(text);
  std::string l;
  for (int i = 0; i <= k; ++i) std::getline(is, l);
  return l;
}

}  // namespace

TEST_CASE("cli orbit") {
  auto r = cli("orbit --a 63/100");
  CHECK(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["kappa"] == 2);

  r = cli("orbit --a 2/3 --max-iter 50");
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["classification"] == "AperiodicUpTo");
  CHECK(j["horizon"] == 50);

  CHECK(cli("orbit --a 3/4").status == 2);
  CHECK(cli("orbit --a 3/4 --experimental").status == 0);
  CHECK(cli("orbit --a 0.63").status == 2);
  CHECK(cli("orbit --a 0.63 --inexact").status == 0);
  CHECK(cli("orbit --a abc").status == 2);
  CHECK(cli("").status == 2);
}

TEST_CASE("cli lambda") {
  auto r = cli("lambda --p 0.5 --a 2/3");
  CHECK(r.status == 0);
  CHECK(line(r.out, 1).rfind("2,3,0.75", 0) == 0);

  r = cli("lambda --p 0.5 --a 1/3");
  CHECK(r.status == 0);
  CHECK(line(r.out, 1).rfind("1,3,0.5,", 0) == 0);

  r = cli("lambda --p 0.5 --a-grid 0.55:0.65:11");
  CHECK(r.status == 0);
  double prev = 0.0;
  for (int k = 1; k <= 11; ++k) {
    const std::string l = line(r.out, k);
    const auto c1 = l.find(',');
    const auto c2 = l.find(',', c1 + 1);
    const auto c3 = l.find(',', c2 + 1);
    const double lam = std::stod(l.substr(c2 + 1, c3 - c2 - 1));
    CHECK(lam >= prev - 2e-10);
    prev = lam;
  }
  CHECK(cli("lambda --p 0.5").status == 2);
  CHECK(cli("lambda --p 1.5 --a 2/3").status == 2);
}

TEST_CASE("cli cdf") {
  const auto r = cli("cdf --a 2/3 --p 0.5 --grid 0:3:31");
  CHECK(r.status == 0);
  CHECK(line(r.out, 0) == "z,cdf,tail_bound");
  for (int k = 1; k <= 31; ++k) {
    const std::string l = line(r.out, k);
    const double z = std::stod(l.substr(0, l.find(',')));
    const double F = std::stod(l.substr(l.find(',') + 1));
    CHECK(F == doctest::Approx(z / 3.0).epsilon(1e-8));
  }
}

TEST_CASE("cli lumped") {
  auto r = cli("lumped --a 63/100 --p 0.5");
  CHECK(r.status == 0);
  CHECK(r.out == "1,0,0,0\n0.5,0,0,0.5\n0,0.5,0.5,0\n0.5,0,0.5,0\n");
  r = cli("lumped --a 63/100 --p 0.5 --format json");
  CHECK(nlohmann::json::parse(r.out)["dim"] == 4);
  CHECK(cli("lumped --a 2/3 --p 0.5 --max-iter 100").status == 2);
}

TEST_CASE("cli validate and manifests") {
  const std::string out = "cli_validate_test.json";
  const std::string args = "validate --a 63/100 --p 0.5 --n 20 --reps 200000 --seed 7 --out " + out;
  REQUIRE(cli(args).status == 0);
  std::ifstream f(out);
  const auto rep = nlohmann::json::parse(f);
  CHECK(rep["pass"] == true);
  CHECK(std::abs(rep["matrix"]["lambda"].get<double>() - rep["analytic"]["lambda"].get<double>()) < 1e-8);
  std::ifstream mf(out + ".manifest.json");
  const auto man = nlohmann::json::parse(mf);
  CHECK(man["subcommand"] == "validate");
  CHECK(man["params"]["a"] == "63/100");
  CHECK(man["config_hash"] == rep["config_hash"]);

  // Re-running reproduces the output byte for byte.
  std::stringstream first;
  first << std::ifstream(out).rdbuf();
  REQUIRE(cli(args).status == 0);
  std::stringstream second;
  second << std::ifstream(out).rdbuf();
  CHECK(first.str() == second.str());
  std::remove(out.c_str());
  std::remove((out + ".manifest.json").c_str());
}
