#include <random>

#include "doctest.h"
#include "trapdyn/dynamics.hpp"
#include "trapdyn/kernels.hpp"
#include "trapdyn/modfield.hpp"

using namespace trapdyn;
using kernels::Backend;

namespace {

PolyMap random_map(std::mt19937_64& rng, std::size_t n) {
  std::vector<Polynomial> comps;
  std::uniform_int_distribution<int> c(-50, 50);
  std::uniform_int_distribution<unsigned> e(0, 6);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Monomial> ms;
    for (int t = 0; t < 5; ++t) {
      Exponents ex(n);
      for (auto& x : ex) x = e(rng);
      ms.push_back({ex, c(rng)});
    }
    comps.push_back(Polynomial::from_terms(n, ms));
  }
  return PolyMap(comps);
}

const std::vector<Residue> kPrimes = {2, 3, 5, 7, 31, 257, 65537, 1000003, 67108859};

}  // namespace

TEST_CASE("backend registry") {
  CHECK(kernels::backend_available(Backend::scalar));
  CHECK(kernels::backend_from_name("scalar") == Backend::scalar);
  CHECK(kernels::backend_from_name("avx2") == Backend::avx2);
  CHECK_FALSE(kernels::backend_from_name("neon"));
  CHECK(kernels::backend_name(Backend::avx2) == "avx2");
}

TEST_CASE("map_batch backends agree with reference evaluation") {
  std::mt19937_64 rng(42);
  for (Residue p : kPrimes) {
    for (std::size_t n : {1u, 2u, 3u}) {
      const PolyMap m = random_map(rng, n);
      const auto cm = kernels::compile_map(m, p);
      const std::size_t count = 37;
      std::vector<Residue> in(n * count);
      for (auto& v : in) v = static_cast<Residue>(rng() % p);
      std::vector<Residue> scalar(n * count), simd(n * count);
      kernels::map_batch(Backend::scalar, cm, in, scalar, count);
      kernels::map_batch(Backend::avx2, cm, in, simd, count);
      CHECK(scalar == simd);
      for (std::size_t j = 0; j < count; ++j) {
        std::vector<Residue> c(n);
        for (std::size_t v = 0; v < n; ++v) c[v] = in[v * count + j];
        const Point img = map_evaluate(m, Point(c, p));
        for (std::size_t v = 0; v < n; ++v) CHECK(scalar[v * count + j] == img.coords[v]);
      }
    }
  }
}

TEST_CASE("iterate_batch backends agree") {
  std::mt19937_64 rng(5);
  for (auto which : {BuiltinMap::additive_trap, BuiltinMap::multiplicative_trap, BuiltinMap::power_trap}) {
    for (Residue p : {7u, 65537u, 1000003u}) {
      const auto cm = kernels::compile_map(builtin(which), p);
      const std::size_t count = 101;
      std::vector<Residue> a(2 * count);
      for (auto& v : a) v = static_cast<Residue>(rng() % p);
      std::vector<Residue> b = a;
      std::vector<Residue> start = a;
      kernels::iterate_batch(Backend::scalar, cm, a, count, 9);
      kernels::iterate_batch(Backend::avx2, cm, b, count, 9);
      CHECK(a == b);
      const Point ref = iterate_k(builtin(which), Point({start[3], start[count + 3]}, p), 9);
      CHECK(a[3] == ref.coords[0]);
      CHECK(a[count + 3] == ref.coords[1]);
    }
  }
}

TEST_CASE("row_successors backends agree and match map evaluation") {
  std::mt19937_64 rng(9);
  for (Residue p : {2u, 3u, 13u, 101u, 4093u}) {
    const PolyMap m = random_map(rng, 2);
    const FunctionalGraph scalar = build_graph(m, p, GraphOptions{.backend = Backend::scalar});
    const FunctionalGraph simd = build_graph(m, p, GraphOptions{.backend = Backend::avx2});
    CHECK(scalar.successor() == simd.successor());
    for (int t = 0; t < 200; ++t) {
      const Point pt({static_cast<Residue>(rng() % p), static_cast<Residue>(rng() % p)}, p);
      CHECK(scalar.successor()[point_index(pt)] == point_index(map_evaluate(m, pt)));
    }
  }
}
