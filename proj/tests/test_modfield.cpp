#include <numeric>
#include <set>

#include "doctest.h"
#include "trapdyn/error.hpp"
#include "trapdyn/modfield.hpp"
#include "trapdyn/poly.hpp"

using namespace trapdyn;

namespace {

Residue naive_pow(Residue a, std::uint64_t e, Residue p) {
  std::uint64_t r = 1 % p;
  for (std::uint64_t i = 0; i < e; ++i) r = r * a % p;
  return static_cast<Residue>(r);
}

std::uint64_t naive_order(Residue a, Residue p) {
  std::uint64_t x = a % p;
  for (std::uint64_t m = 1;; ++m) {
    if (x == 1) return m;
    x = x * a % p;
  }
}

bool naive_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d < n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
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

}  // namespace

TEST_CASE("primality") {
  for (std::uint64_t n = 0; n < 2000; ++n) CHECK(is_prime(n) == naive_prime(n));
  CHECK(is_prime(65537));
  CHECK_FALSE(is_prime(65537ull * 3));
  CHECK(code_of([] { require_prime(4); }) == ErrorCode::non_prime_modulus);
}

TEST_CASE("mod_pow") {
  CHECK(mod_pow(2, 3, 7) == 1);
  CHECK(mod_pow(5, 0, 7) == 1);
  CHECK(mod_pow(0, 0, 7) == 1);
  CHECK(mod_pow(3, 4, 5) == 1);
  for (Residue p = 2; p < 60; ++p) {
    if (!is_prime(p)) continue;
    for (Residue a = 0; a < p; ++a) {
      for (std::uint64_t e = 0; e < 2 * p; ++e) CHECK(mod_pow(a, e, p) == naive_pow(a, e, p));
    }
  }
  // Large modulus, Fermat's little theorem.
  CHECK(mod_pow(123456, 4294967290ull, 4294967291u) == 1);
}

TEST_CASE("mod_inv") {
  CHECK(mod_inv(3, 7) == 5);
  CHECK(mod_inv(1, 13) == 1);
  CHECK(mod_inv(2, 5) == 3);
  for (Residue p : {2u, 3u, 101u, 65537u}) {
    for (Residue a = 1; a < std::min<Residue>(p, 500); ++a) CHECK(mod_mul(a, mod_inv(a, p), p) == 1);
  }
  CHECK(code_of([] { mod_inv(0, 7); }) == ErrorCode::zero_inverse);
}

TEST_CASE("mult_order") {
  CHECK(mult_order(2, 7) == 3);
  CHECK(mult_order(1, 13) == 1);
  CHECK(mult_order(2, 11) == 10);
  for (Residue p = 2; p < 200; ++p) {
    if (!is_prime(p)) continue;
    std::uint64_t generators = 0;
    for (Residue a = 1; a < p; ++a) {
      const auto ord = mult_order(a, p);
      CHECK(ord == naive_order(a, p));
      CHECK((p - 1) % ord == 0);  // Lagrange
      generators += is_primitive_root(a, p) ? 1 : 0;
    }
    // Euler phi of p - 1 from its factorization.
    std::uint64_t phi = p - 1;
    for (auto [q, e] : factorize(p - 1)) phi = phi / q * (q - 1);
    CHECK(generators == phi);
  }
  CHECK(code_of([] { mult_order(0, 7); }) == ErrorCode::zero_argument);
}

TEST_CASE("primitive roots, 2-primary, Fermat") {
  CHECK(is_primitive_root(2, 11));
  CHECK_FALSE(is_primitive_root(2, 7));
  CHECK_FALSE(is_primitive_root(1, 7));
  CHECK(is_two_primary(8));
  CHECK(is_two_primary(1));
  CHECK_FALSE(is_two_primary(12));
  CHECK(fermat_exponent(17) == 4u);
  CHECK(fermat_exponent(257) == 8u);
  CHECK(fermat_exponent(3) == 1u);
  CHECK(fermat_exponent(65537) == 16u);
  CHECK_FALSE(fermat_exponent(11));
  CHECK(cyclic_subgroup(2, 7) == std::vector<Residue>{1, 2, 4});
  for (Residue p : {3u, 5u, 17u, 257u}) {
    for (Residue a = 1; a < p; ++a) CHECK(is_two_primary(mult_order(a, p)));
  }
}

TEST_CASE("factorize") {
  for (std::uint64_t n = 2; n < 3000; ++n) {
    std::uint64_t prod = 1;
    for (auto [q, e] : factorize(n)) {
      CHECK(naive_prime(q));
      for (unsigned i = 0; i < e; ++i) prod *= q;
    }
    CHECK(prod == n);
  }
}

TEST_CASE("extension field construction") {
  auto f4 = make_ext_field(2, 2);
  CHECK(f4->modulus() == std::vector<Residue>{1, 1, 1});
  CHECK(f4->modulus_string() == "t^2 + t + 1");
  CHECK(f4->size() == 4);
  auto f3 = make_ext_field(3, 1);
  CHECK(f3->size() == 3);
  CHECK(code_of([] { make_ext_field(2, 2, std::vector<Residue>{1, 0, 1}); }) == ErrorCode::reducible_polynomial);
  CHECK(code_of([] { make_ext_field(4, 2); }) == ErrorCode::non_prime_modulus);
  CHECK(code_of([] { make_ext_field(2, 40); }) == ErrorCode::size_bound_exceeded);
  // Irreducibility count against the necklace formula for small cases.
  auto count_irreducible = [](Residue p, unsigned k) {
    std::uint64_t total = 1;
    for (unsigned i = 0; i < k; ++i) total *= p;
    std::uint64_t n = 0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::vector<Residue> m;
      std::uint64_t v = idx;
      for (unsigned i = 0; i < k; ++i, v /= p) m.push_back(static_cast<Residue>(v % p));
      m.push_back(1);
      n += is_irreducible(m, p) ? 1 : 0;
    }
    return n;
  };
  CHECK(count_irreducible(2, 2) == 1);
  CHECK(count_irreducible(2, 3) == 2);
  CHECK(count_irreducible(2, 4) == 3);
  CHECK(count_irreducible(3, 2) == 3);
  CHECK(count_irreducible(3, 3) == 8);
  CHECK(count_irreducible(5, 2) == 10);
}

TEST_CASE("extension field arithmetic") {
  auto f4 = make_ext_field(2, 2);
  const ExtElement w = f4->generator();
  CHECK(ext_mul(w, w) == ext_add(w, f4->one()));
  CHECK(ext_add(w, w).is_zero());
  const std::vector<ExtElement> pt{f4->one(), w};
  CHECK(ext_eval_poly(parse("x^2*y + x*y^2", 2), pt) == f4->one());

  for (auto [p, k] : std::vector<std::pair<Residue, unsigned>>{{2, 3}, {3, 2}, {5, 2}, {2, 4}, {7, 2}}) {
    auto f = make_ext_field(p, k);
    // Multiplicative group has order p^k - 1; every nonzero element has an inverse.
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 1; i < f->size(); ++i) {
      const ExtElement a = f->element(i);
      CHECK(a.index() == i);
      CHECK(ext_pow(a, f->size() - 1) == f->one());
      bool has_inverse = false;
      for (std::uint64_t j = 1; j < f->size() && !has_inverse; ++j) has_inverse = ext_mul(a, f->element(j)) == f->one();
      CHECK(has_inverse);
      seen.insert(ext_mul(a, f->generator()).index());
    }
    CHECK(seen.size() == f->size() - 1);
    // Distributivity on a sample.
    for (std::uint64_t i = 0; i < std::min<std::uint64_t>(f->size(), 20); ++i) {
      for (std::uint64_t j = 0; j < std::min<std::uint64_t>(f->size(), 20); ++j) {
        const auto a = f->element(i), b = f->element(j), c = f->generator();
        CHECK(ext_mul(c, ext_add(a, b)) == ext_add(ext_mul(c, a), ext_mul(c, b)));
      }
    }
  }
}
