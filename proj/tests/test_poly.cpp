#include <map>
#include <random>

#include "doctest.h"
#include "trapdyn/error.hpp"
#include "trapdyn/modfield.hpp"
#include "trapdyn/poly.hpp"

using namespace trapdyn;

namespace {

std::map<Exponents, Coefficient> term_map(const Polynomial& p) {
  std::map<Exponents, Coefficient> m;
  for (const auto& t : p.terms()) m[t.exponents] = t.coefficient;
  return m;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::syntax;
}

Polynomial random_poly(std::mt19937_64& rng, std::size_t n, unsigned max_deg, int terms) {
  std::vector<Monomial> ms;
  std::uniform_int_distribution<int> c(-9, 9);
  std::uniform_int_distribution<unsigned> e(0, max_deg);
  for (int i = 0; i < terms; ++i) {
    Exponents ex(n);
    for (auto& x : ex) x = e(rng);
    ms.push_back({ex, c(rng)});
  }
  return Polynomial::from_terms(n, ms);
}

}  // namespace

TEST_CASE("parse builds canonical terms") {
  CHECK(term_map(parse("x^2*y + x*y^2", 2)) == std::map<Exponents, Coefficient>{{{2, 1}, 1}, {{1, 2}, 1}});
  CHECK(parse("0", 2).is_zero());
  CHECK(parse("0", 2).terms().empty());
  CHECK(term_map(parse("x^2*y*(x-y)", 2)) == std::map<Exponents, Coefficient>{{{3, 1}, 1}, {{2, 2}, -1}});
  CHECK(parse("2x^2y", 2) == parse("2*x^2*y", 2));
  CHECK(parse("x1*x3 - x2", 3).terms().size() == 2);
  CHECK(parse("(x+y)^2", 2) == parse("x^2 + 2*x*y + y^2", 2));
  CHECK(parse("x - x", 2).is_zero());
}

TEST_CASE("parse errors") {
  CHECK(code_of([] { parse("x +", 2); }) == ErrorCode::syntax);
  CHECK(code_of([] { parse("x ^ ", 2); }) == ErrorCode::syntax);
  CHECK(code_of([] { parse("z", 2); }) == ErrorCode::syntax);
  CHECK(code_of([] { parse("x3", 2); }) == ErrorCode::variable_out_of_range);
  CHECK(code_of([] { parse("99999999999", 2); }) == ErrorCode::coefficient_overflow);
  CHECK(code_of([] { parse("3*x", 2, ParseOptions{2}); }) == ErrorCode::coefficient_overflow);
}

TEST_CASE("printing round-trips") {
  CHECK(parse("x^3*y - x^2*y^2", 2).to_string() == "x^3*y - x^2*y^2");
  CHECK(Polynomial(2).to_string() == "0");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + i % 4;
    const Polynomial p = random_poly(rng, n, 5, 1 + i % 6);
    CHECK(parse(p.to_string(), n) == p);
  }
}

TEST_CASE("terms are stored in descending graded-lex order") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Polynomial p = random_poly(rng, 3, 4, 8);
    for (std::size_t j = 1; j < p.terms().size(); ++j) {
      CHECK(compare_graded_lex(p.terms()[j - 1].exponents, p.terms()[j].exponents) > 0);
    }
  }
}

TEST_CASE("builtin maps") {
  using M = std::map<Exponents, Coefficient>;
  const PolyMap at = builtin(BuiltinMap::additive_trap);
  CHECK(term_map(at.components[0]) == M{{{2, 1}, 1}});
  CHECK(term_map(at.components[1]) == M{{{2, 1}, 1}, {{1, 2}, 1}});
  const PolyMap mt = builtin("multiplicative_trap");
  CHECK(term_map(mt.components[0]) == M{{{3, 1}, 1}, {{2, 2}, -1}});
  CHECK(term_map(mt.components[1]) == M{{{2, 2}, 2}, {{1, 3}, -2}});
  const PolyMap pt = builtin("power_trap");
  CHECK(term_map(pt.components[0]) == M{{{4, 1}, 1}, {{3, 2}, -1}});
  CHECK(term_map(pt.components[1]) == M{{{2, 3}, 1}, {{1, 4}, -1}});
  CHECK(code_of([] { builtin("nope"); }) == ErrorCode::unknown_map);
}

TEST_CASE("builtins equal their factored forms") {
  // Oracle: the factored expressions, parsed independently.
  CHECK(builtin("multiplicative_trap") == parse_map("x^2*y*(x-y); 2*x*y^2*(x-y)"));
  CHECK(builtin("power_trap") == parse_map("x^3*y*(x-y); x*y^3*(x-y)"));
}

TEST_CASE("evaluation mod p") {
  CHECK(evaluate_mod(parse("x^2*y + x*y^2", 2), Point({2, 3}, 7)) == 2);
  CHECK(evaluate_mod(parse("x^3 - 2*x*y", 2), Point({0, 0}, 11)) == 0);
  CHECK(evaluate_mod(Polynomial(2), Point({4, 5}, 7)) == 0);
  const PolyMap at = builtin(BuiltinMap::additive_trap);
  CHECK(map_evaluate(at, Point({2, 3}, 7)) == Point({5, 2}, 7));
  CHECK(map_evaluate(at, Point({1, 1}, 2)) == Point({1, 0}, 2));
  const PolyMap mt = builtin(BuiltinMap::multiplicative_trap);
  for (Residue p : {2u, 3u, 5u, 13u}) {
    for (Residue x = 0; x < p; ++x) CHECK(map_evaluate(mt, Point({x, x}, p)).is_zero());
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Polynomial f = random_poly(rng, 2, 4, 4);
    const Polynomial g = random_poly(rng, 2, 4, 4);
    const Residue p = std::vector<Residue>{2, 3, 5, 7, 31, 101}[i % 6];
    const Point pt({static_cast<Residue>(rng() % p), static_cast<Residue>(rng() % p)}, p);
    const Residue a = evaluate_mod(f, pt);
    const Residue b = evaluate_mod(g, pt);
    CHECK(evaluate_mod(f + g, pt) == mod_add(a, b, p));
    CHECK(evaluate_mod(f * g, pt) == mod_mul(a, b, p));
    CHECK(evaluate_mod(-f, pt) == mod_sub(0, a, p));
  }
}

TEST_CASE("homogeneity") {
  CHECK(is_homogeneous(builtin(BuiltinMap::additive_trap)));
  CHECK(degree(builtin(BuiltinMap::additive_trap).components[1]) == 3);
  CHECK(is_homogeneous(builtin(BuiltinMap::power_trap)));
  CHECK(degree(builtin(BuiltinMap::power_trap).components[0]) == 5);
  CHECK_FALSE(is_homogeneous(parse_map("x^2\ny")));
  // Homogeneous of degree d: f(c*x, c*y) = c^d f(x, y).
  for (auto which : {BuiltinMap::additive_trap, BuiltinMap::multiplicative_trap, BuiltinMap::power_trap}) {
    const PolyMap m = builtin(which);
    const unsigned d = degree(m.components[0]);
    for (Residue c = 1; c < 13; ++c) {
      for (Residue x = 0; x < 13; ++x) {
        const Point a = map_evaluate(m, Point({x, 5}, 13));
        const Point b = map_evaluate(m, Point({mod_mul(c, x, 13), mod_mul(c, 5, 13)}, 13));
        for (int k = 0; k < 2; ++k) CHECK(b.coords[k] == mod_mul(mod_pow(c, d, 13), a.coords[k], 13));
      }
    }
  }
}

TEST_CASE("map parsing and validation") {
  const PolyMap m = parse_map("# comment\nx^2*y\nx^2*y + x*y^2\n");
  CHECK(m == builtin(BuiltinMap::additive_trap));
  CHECK(code_of([] { Point({7, 1}, 7); }) == ErrorCode::out_of_range);
  CHECK(code_of([] { map_evaluate(builtin(BuiltinMap::additive_trap), Point({1, 2, 3}, 7)); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(Point({2, 3}, 7).to_string() == "(2,3)");
}

TEST_CASE("checked arithmetic") {
  const Polynomial big = Polynomial::constant(1, std::int64_t{1} << 40);
  CHECK(code_of([&] { (void)(big * big); }) == ErrorCode::coefficient_overflow);
  CHECK(parse("x+1", 1).pow(3) == parse("x^3 + 3*x^2 + 3*x + 1", 1));
}
