#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = trapdyn::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("trapdyn_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("prime specs") {
  CHECK(trapdyn::cli::parse_primes("2..199").size() == 46);
  CHECK(trapdyn::cli::parse_primes("7") == std::vector<std::uint64_t>{7});
  CHECK(trapdyn::cli::parse_primes("2,3,10..13") == std::vector<std::uint64_t>{2, 3, 11, 13});
}

TEST_CASE("verify") {
  const auto a = run({"verify", "additive_trap", "--primes", "2..199"});
  CHECK(a.code == 0);
  // Header, 46 rows, footer.
  CHECK(count_lines(a.out) == 48);
  CHECK(a.out.find("NO") == std::string::npos);

  const auto m = run({"verify", "multiplicative_trap", "--primes", "7"});
  CHECK(m.code == 0);
  CHECK(m.out.find("conditional claim: 2 not a generator; untrapped witness (1,3)") != std::string::npos);

  const auto bad = run({"verify", "power_trap", "--primes", "4"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("4 is not prime") != std::string::npos);

  CHECK(run({"verify", "nonsense", "--primes", "7"}).code == 2);
  CHECK(run({"verify", "additive_trap"}).code == 2);

  const auto identity = temp_path("identity.map");
  std::ofstream(identity) << "x\ny\n";
  const auto f = run({"verify", identity.string(), "--primes", "3"});
  CHECK(f.code == 1);
}

TEST_CASE("verify json is reproducible") {
  const auto p1 = temp_path("a.json"), p2 = temp_path("b.json");
  const std::vector<std::string> base = {"verify", "all", "--primes", "2..13", "--claims", "all", "--reproducible"};
  auto a1 = base, a2 = base;
  a1.insert(a1.end(), {"--json", p1.string()});
  a2.insert(a2.end(), {"--json", p2.string()});
  CHECK(run(a1).code == 0);
  CHECK(run(a2).code == 0);
  const auto j = nlohmann::json::parse(slurp(p1));
  CHECK(j["manifest"]["command"] == "verify");
  CHECK(j["manifest"]["seed"] == 20110101);
  CHECK_FALSE(j["manifest"].contains("started"));
  CHECK(j["reports"].size() > 20);
  auto r1 = j["reports"];
  auto r2 = nlohmann::json::parse(slurp(p2))["reports"];
  CHECK(r1 == r2);
}

TEST_CASE("orbit") {
  const auto a = run({"orbit", "additive_trap", "7", "2", "3"});
  CHECK(a.code == 0);
  CHECK(a.out.rfind("(2,3) -> (5,2)", 0) == 0);
  CHECK(a.out.find("reaches (0,0) after") != std::string::npos);

  const auto m = run({"orbit", "multiplicative_trap", "7", "1", "3"});
  CHECK(m.code == 0);
  CHECK(m.out.find("never reaches (0,0); cycle detected") != std::string::npos);

  CHECK(run({"orbit", "multiplicative_trap", "7", "1", "3", "--max-steps", "2"}).code == 3);
  CHECK(run({"orbit", "multiplicative_trap", "8", "1", "3"}).code == 2);
  CHECK(run({"orbit", "multiplicative_trap", "7", "1"}).code == 2);
}

TEST_CASE("graph") {
  const auto g = run({"graph", "additive_trap", "2", "--export", "summary"});
  CHECK(g.code == 0);
  const auto j = nlohmann::json::parse(g.out);
  CHECK(j["cycle_spectrum"] == nlohmann::json::array({1}));
  CHECK(j["max_tail_depth"] == 2);

  const auto e = run({"graph", "additive_trap", "2", "--export", "edges"});
  CHECK(e.out == "0 -> 0\n1 -> 0\n2 -> 0\n3 -> 2\n");

  const auto big = run({"graph", "additive_trap", "101", "--budget", "100"});
  CHECK(big.code == 3);
  CHECK(big.err.find("orbit") != std::string::npos);
}

TEST_CASE("ext") {
  const auto a = run({"ext", "additive_trap", "2", "2"});
  CHECK(a.code == 0);
  CHECK(a.out.find("t^2 + t + 1") != std::string::npos);
  CHECK(a.out.find("2-cycle: (t,1) -> (t + 1,1)") != std::string::npos);

  const auto b = run({"ext", "additive_trap", "2", "1"});
  CHECK(b.out.find("no nonzero periodic points") != std::string::npos);

  CHECK(run({"ext", "additive_trap", "2", "2", "--modulus", "t^2+1"}).code == 2);
  CHECK(run({"ext", "additive_trap", "3", "2", "--modulus", "t^2+1"}).code == 0);
}

TEST_CASE("search") {
  const auto cfg = temp_path("small.cfg");
  std::ofstream(cfg) << "max_degree = 2\ncoefficient_range = -1..1\nprimes = 2,3\n";
  const auto a = run({"search", cfg.string(), "--reproducible"});
  const auto b = run({"search", cfg.string(), "--reproducible"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"summary\"") != std::string::npos);

  const auto bad = temp_path("bad.cfg");
  std::ofstream(bad) << "max_degree = two\n";
  CHECK(run({"search", bad.string()}).code == 2);
}

TEST_CASE("help and kernel flag") {
  const auto h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("JSON schemas") != std::string::npos);
  CHECK(run({"--kernel", "scalar", "orbit", "additive_trap", "5", "1", "2"}).code == 0);
  CHECK(run({"--kernel", "neon", "orbit", "additive_trap", "5", "1", "2"}).code == 2);
}
