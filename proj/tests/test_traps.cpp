#include <set>

#include "doctest.h"
#include "trapdyn/error.hpp"
#include "trapdyn/traps.hpp"

using namespace trapdyn;

namespace {

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p <= n; ++p) {
    if (is_prime(p)) out.push_back(p);
  }
  return out;
}

// Oracle: count points whose orbit under `m` never hits (0,0), by direct
// iteration for p^2 + 1 steps.
std::uint64_t brute_untrapped(const PolyMap& m, Residue p) {
  std::uint64_t n = 0;
  for (Residue x = 0; x < p; ++x) {
    for (Residue y = 0; y < p; ++y) {
      n += iterate_k(m, Point({x, y}, p), std::uint64_t{p} * p + 1).is_zero() ? 0 : 1;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("additive trap") {
  const auto r2 = verify_additive_trap(2);
  CHECK(r2.holds);
  CHECK(r2.nilpotency_index == 2u);
  for (std::uint64_t p : {5u, 7u, 23u}) {
    const auto r = verify_additive_trap(p);
    CHECK(r.holds);
    CHECK(*r.nilpotency_index <= p);
    CHECK(r.observed_untrapped == 0);
  }
}

TEST_CASE("multiplicative trap") {
  const auto r11 = verify_multiplicative_trap(11);
  CHECK(r11.holds);
  CHECK(r11.observed_untrapped == 0);
  CHECK(r11.details["two_is_generator"] == true);

  const auto r7 = verify_multiplicative_trap(7);
  CHECK(r7.holds);
  CHECK(r7.details["two_is_generator"] == false);
  REQUIRE(r7.witness);
  CHECK(*r7.witness == Point({1, 3}, 7));
  CHECK(r7.details["untrapped_ratio_classes"] == nlohmann::ordered_json::array({3, 5, 6}));
  CHECK(r7.predicted_untrapped == r7.observed_untrapped);

  CHECK(verify_multiplicative_trap(13).holds);

  // Closed form against direct iteration.
  for (Residue p : {3u, 5u, 7u, 17u, 23u, 31u}) {
    CHECK(predicted_multiplicative_untrapped(p) == brute_untrapped(builtin(BuiltinMap::multiplicative_trap), p));
  }
}

TEST_CASE("power trap") {
  const auto f17 = verify_power_trap_fermat(17);
  CHECK(f17.holds);
  CHECK(f17.details["k"] == 4);
  CHECK(f17.details["iterations"] == 5);
  CHECK(f17.details["k_iterations_suffice"] == false);
  CHECK(f17.details["points_checked"] == 289);

  const auto f5 = verify_power_trap_fermat(5);
  CHECK(f5.holds);
  CHECK(f5.details["iterations"] == 3);

  const auto c7 = verify_power_trap_characterization(7);
  CHECK(c7.holds);
  CHECK(c7.observed_untrapped == 49 - 25);
  CHECK(c7.predicted_untrapped == 49 - 25);

  CHECK(verify_power_trap(7).size() == 1);
  CHECK(verify_power_trap(17).size() == 2);

  for (Residue p : {3u, 5u, 7u, 11u, 13u, 17u, 29u}) {
    CHECK(predicted_power_untrapped(p) == brute_untrapped(builtin(BuiltinMap::power_trap), p));
  }
}

TEST_CASE("ratio recurrences") {
  for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u}) {
    for (auto m : {BuiltinMap::additive_trap, BuiltinMap::multiplicative_trap, BuiltinMap::power_trap}) {
      const auto r = verify_ratio_recurrence(m, p);
      CHECK(r.holds);
    }
  }
  CHECK(verify_ratio_recurrence(BuiltinMap::multiplicative_trap, 7).details["printed_orientation_holds"] == false);
  CHECK(verify_ratio_recurrence(BuiltinMap::power_trap, 7).details["printed_orientation_holds"] == false);
  CHECK(verify_ratio_recurrence(BuiltinMap::power_trap, 5).details["printed_orientation_holds"] == true);
}

TEST_CASE("sampled mode is seeded and deterministic") {
  VerifyOptions opt;
  opt.graph.max_points = 1;
  opt.sample_count = 5000;
  const auto a = verify_power_trap_fermat(257, opt);
  const auto b = verify_power_trap_fermat(257, opt);
  CHECK(a.mode == Mode::sampled);
  CHECK(a.holds);
  CHECK(to_json(a, true) == to_json(b, true));
  const auto m = verify_multiplicative_trap(23, opt);
  CHECK(m.mode == Mode::sampled);
  CHECK(m.holds);
}

TEST_CASE("verify_map and verify_all") {
  const auto reports = verify_map(BuiltinMap::additive_trap, {2, 3, 5}, ClaimSet::all);
  CHECK(reports.size() == 6);
  for (const auto& r : reports) CHECK(r.holds);
  CHECK(verify_map(BuiltinMap::additive_trap, {}).empty());
  const auto bad = verify_map(BuiltinMap::power_trap, {4});
  REQUIRE(bad.size() == 1);
  CHECK_FALSE(bad[0].holds);
  CHECK(bad[0].claim == Claim::input);
  CHECK(bad[0].error->find("not prime") != std::string::npos);

  const auto all = verify_all(primes_up_to(19));
  std::set<std::string> seen;
  for (const auto& r : all) {
    CHECK(r.holds);
    seen.insert(std::string(claim_name(r.claim)));
  }
  CHECK(seen.size() == 5);

  const auto j = to_json(reports[0], true);
  for (const char* key : {"map", "p", "claim", "holds", "nilpotency_index", "witness", "predicted_untrapped",
                          "observed_untrapped", "mode", "elapsed_ms"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["elapsed_ms"] == 0);
}

TEST_CASE("attractor check on custom maps") {
  CHECK(verify_attractor(parse_map("y; 0"), 7).holds);
  const auto r = verify_attractor(identity_map(2), 3);
  CHECK_FALSE(r.holds);
  CHECK(r.witness);
}
