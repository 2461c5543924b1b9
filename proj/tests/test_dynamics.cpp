#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "trapdyn/dynamics.hpp"
#include "trapdyn/error.hpp"

using namespace trapdyn;

namespace {

const PolyMap kAt = builtin(BuiltinMap::additive_trap);
const PolyMap kMt = builtin(BuiltinMap::multiplicative_trap);
const PolyMap kPt = builtin(BuiltinMap::power_trap);

// Oracle: walk the orbit storing first-visit times.
std::pair<std::uint64_t, std::uint64_t> naive_tail_cycle(const PolyMap& m, Point p) {
  std::map<std::vector<Residue>, std::uint64_t> seen;
  for (std::uint64_t t = 0;; ++t) {
    auto [it, fresh] = seen.emplace(p.coords, t);
    if (!fresh) return {it->second, t - it->second};
    p = map_evaluate(m, p);
  }
}

}  // namespace

TEST_CASE("point indexing") {
  CHECK(point_index(Point({2, 3}, 7)) == 17);
  CHECK(point_index(Point({0, 0}, 5)) == 0);
  CHECK(point_of_index(17, 7, 2) == Point({2, 3}, 7));
  for (std::uint64_t i = 0; i < 125; ++i) CHECK(point_index(point_of_index(i, 5, 3)) == i);
}

TEST_CASE("iterate_k") {
  CHECK(iterate_k(kAt, Point({1, 1}, 2), 2) == Point({0, 0}, 2));
  CHECK(iterate_k(kMt, Point({3, 4}, 7), 0) == Point({3, 4}, 7));
  CHECK(iterate_k(kAt, Point({2, 3}, 7), 1) == Point({5, 2}, 7));
}

TEST_CASE("orbit summaries") {
  const auto a = orbit(kAt, Point({1, 1}, 2), 100);
  CHECK(a.tail_length == 2);
  CHECK(a.cycle_length == 1);
  CHECK(a.hits_target);
  CHECK(a.steps_to_target == 2u);

  const auto b = orbit(kMt, Point({1, 3}, 7), 100);
  CHECK_FALSE(b.hits_target);
  CHECK(b.cycle_length % 3 == 0);
  // Ratio classes along the cycle are {3, 6, 5}.
  std::set<Residue> ratios;
  Point cur = iterate_k(kMt, Point({1, 3}, 7), b.tail_length);
  for (std::uint64_t i = 0; i < b.cycle_length; ++i) {
    ratios.insert(mod_mul(cur.coords[1], mod_inv(cur.coords[0], 7), 7));
    cur = map_evaluate(kMt, cur);
  }
  CHECK(ratios == std::set<Residue>{3, 5, 6});

  const auto z = orbit(kPt, Point({0, 0}, 11), 10);
  CHECK(z.tail_length == 0);
  CHECK(z.cycle_length == 1);
  CHECK(z.steps_to_target == 0u);

  bool threw = false;
  try {
    orbit(kMt, Point({1, 3}, 7), 2);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::budget_exceeded;
  }
  CHECK(threw);
}

TEST_CASE("graph of the additive map mod 2") {
  const auto g = build_graph(kAt, 2);
  CHECK(g.size() == 4);
  CHECK(g.cycles() == std::vector<std::vector<std::uint32_t>>{{0}});
  CHECK(g.tail_depth() == std::vector<std::uint32_t>{0, 1, 1, 2});
  CHECK(nilpotency_index(g, Point({0, 0}, 2)) == 2u);
  CHECK(cycle_spectrum(g) == std::vector<std::uint64_t>{1});
  CHECK(g.max_tail_depth() == 2);
  std::ostringstream s;
  write_edge_list(s, g);
  CHECK(s.str() == "0 -> 0\n1 -> 0\n2 -> 0\n3 -> 2\n");
  CHECK(graph_summary_json(g).find("\"cycle_spectrum\":[1]") != std::string::npos);
}

TEST_CASE("identity graph") {
  const auto g = build_graph(identity_map(2), 3);
  CHECK(g.cycles().size() == 9);
  for (auto d : g.tail_depth()) CHECK(d == 0);
  CHECK(cycle_spectrum(g) == std::vector<std::uint64_t>(9, 1));
  CHECK_FALSE(nilpotency_index(g, Point({0, 0}, 3)));
}

TEST_CASE("multiplicative map mod 7 has a foreign cycle") {
  const auto g = build_graph(kMt, 7);
  CHECK(g.cycles().size() > 1);
  CHECK_FALSE(nilpotency_index(g, Point({0, 0}, 7)));
  const auto trapped = trapped_set(g, Point({0, 0}, 7));
  CHECK(trapped.size() < 49);
  CHECK_FALSE(std::binary_search(trapped.begin(), trapped.end(), point_index(Point({1, 3}, 7))));
  CHECK(trapped_set(build_graph(kAt, 5), Point({0, 0}, 5)).size() == 25);
  bool threw = false;
  try {
    trapped_set(build_graph(kAt, 5), Point({1, 0}, 5));
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::target_not_fixed;
  }
  CHECK(threw);
}

TEST_CASE("graph structure invariants") {
  for (const PolyMap* m : {&kAt, &kMt, &kPt}) {
    for (Residue p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u}) {
      const auto g = build_graph(*m, p);
      // Basins partition the plane.
      std::uint64_t total = 0;
      for (auto s : g.basin_sizes()) total += s;
      CHECK(total == g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = g.successor()[i];
        CHECK(g.basin_id()[s] == g.basin_id()[i]);
        if (g.tail_depth()[i] > 0) {
          CHECK(g.tail_depth()[s] + 1 == g.tail_depth()[i]);
        } else {
          CHECK(g.tail_depth()[s] == 0);
        }
        const auto [tail, cycle] = naive_tail_cycle(*m, point_of_index(i, p, 2));
        CHECK(tail == g.tail_depth()[i]);
        CHECK(cycle == g.cycle_length_of(i));
      }
      // Cycles are listed from their smallest member.
      for (const auto& c : g.cycles()) CHECK(*std::min_element(c.begin(), c.end()) == c.front());
    }
  }
}

TEST_CASE("graph budget and chunking") {
  bool threw = false;
  try {
    build_graph(kAt, 101, GraphOptions{.max_points = 1000});
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::size_bound_exceeded;
  }
  CHECK(threw);
  const auto a = build_graph(kPt, 101, GraphOptions{.chunk_size = 7, .jobs = 3});
  const auto b = build_graph(kPt, 101, GraphOptions{.jobs = 1});
  CHECK(a.successor() == b.successor());
  CHECK(a.tail_depth() == b.tail_depth());
  // Three variables.
  const auto m3 = parse_map("x2*x3; x3; 0");
  const auto g3 = build_graph(m3, 5);
  CHECK(g3.size() == 125);
  CHECK(nilpotency_index(g3, Point({0, 0, 0}, 5)) == 2u);
}

TEST_CASE("periodic points over extension fields") {
  auto f4 = make_ext_field(2, 2);
  const auto pts = periodic_points_ext(kAt, f4);
  const ExtElement w = f4->generator();
  const ExtElement w2 = ext_mul(w, w);
  auto has = [&](const ExtElement& a, const ExtElement& b, std::uint64_t period) {
    for (const auto& pp : pts) {
      if (pp.point[0] == a && pp.point[1] == b && pp.period == period) return true;
    }
    return false;
  };
  CHECK(has(f4->zero(), f4->zero(), 1));
  CHECK(has(w, f4->one(), 2));
  CHECK(has(w2, f4->one(), 2));

  const auto base = periodic_points_ext(kAt, make_ext_field(2, 1));
  REQUIRE(base.size() == 1);
  CHECK(base[0].point[0].is_zero());
  CHECK(base[0].point[1].is_zero());
}
