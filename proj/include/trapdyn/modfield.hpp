#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trapdyn/poly.hpp"

namespace trapdyn {

inline constexpr std::uint64_t kDefaultEnumerationBound = std::uint64_t{1} << 20;

// ---------------------------------------------------------------------------
// Prime-field arithmetic. Residues are in [0, p) with p < 2^32.
// ---------------------------------------------------------------------------

/// Deterministic trial division up to sqrt(n).
bool is_prime(std::uint64_t n) noexcept;
/// Throws Error(non_prime_modulus) unless p is prime.
void require_prime(std::uint64_t p);

inline Residue mod_add(Residue a, Residue b, Residue p) noexcept {
  const std::uint64_t s = std::uint64_t{a} + b;
  return static_cast<Residue>(s >= p ? s - p : s);
}
inline Residue mod_sub(Residue a, Residue b, Residue p) noexcept {
  return a >= b ? a - b : static_cast<Residue>(std::uint64_t{a} + p - b);
}
inline Residue mod_mul(Residue a, Residue b, Residue p) noexcept {
  return static_cast<Residue>(std::uint64_t{a} * b % p);
}
/// Reduces a signed integer into [0, p).
inline Residue reduce(std::int64_t c, Residue p) noexcept {
  const std::int64_t r = c % static_cast<std::int64_t>(p);
  return static_cast<Residue>(r < 0 ? r + p : r);
}

/// a^e mod p by square-and-multiply. 0^0 is 1.
Residue mod_pow(Residue a, std::uint64_t e, Residue p) noexcept;
/// Throws Error(zero_inverse) when a == 0 mod p.
Residue mod_inv(Residue a, Residue p);

/// Prime factorization by trial division, ascending primes with multiplicity.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

/// Least m >= 1 with a^m == 1 mod p. Throws Error(zero_argument) for a == 0.
std::uint64_t mult_order(Residue a, Residue p);
bool is_primitive_root(Residue a, Residue p);
/// True iff n is a power of two (1 included).
bool is_two_primary(std::uint64_t n) noexcept;
/// k with p == 2^k + 1, if any.
std::optional<unsigned> fermat_exponent(std::uint64_t p) noexcept;

/// Sorted elements of the cyclic subgroup generated by g in (Z/pZ)^*.
std::vector<Residue> cyclic_subgroup(Residue g, Residue p);

// ---------------------------------------------------------------------------
// Small extension fields GF(p^k) = F_p[t] / (modulus).
// ---------------------------------------------------------------------------

class ExtField;
using ExtFieldPtr = std::shared_ptr<const ExtField>;

struct ExtElement {
  std::vector<Residue> coeffs;  // c0 + c1 t + ... + c_{k-1} t^{k-1}
  ExtFieldPtr field;

  bool is_zero() const noexcept;
  /// Base-p integer with c0 least significant; a bijection onto [0, p^k).
  std::uint64_t index() const noexcept;
  std::string to_string() const;

  friend bool operator==(const ExtElement& a, const ExtElement& b);
};

class ExtField : public std::enable_shared_from_this<ExtField> {
 public:
  Residue p() const noexcept { return p_; }
  unsigned k() const noexcept { return k_; }
  std::uint64_t size() const noexcept { return size_; }
  /// Monic modulus, coefficients low to high (length k + 1).
  const std::vector<Residue>& modulus() const noexcept { return modulus_; }
  std::string modulus_string() const;

  ExtElement zero() const;
  ExtElement one() const;
  ExtElement from_integer(std::int64_t c) const;
  /// Inverse of ExtElement::index.
  ExtElement element(std::uint64_t index) const;
  /// Class of t (a root of the modulus).
  ExtElement generator() const;

  friend bool operator==(const ExtField& a, const ExtField& b) noexcept {
    return a.p_ == b.p_ && a.modulus_ == b.modulus_;
  }

 private:
  friend ExtFieldPtr make_ext_field(std::uint64_t, unsigned, std::optional<std::vector<Residue>>,
                                    std::uint64_t);
  ExtField(Residue p, std::vector<Residue> modulus);

  Residue p_;
  unsigned k_;
  std::uint64_t size_;
  std::vector<Residue> modulus_;
};

/// True iff the monic polynomial (coefficients low to high) has no monic
/// factor of degree 1..deg/2 over F_p. Exhaustive; intended for small p^deg.
bool is_irreducible(std::span<const Residue> monic, Residue p);

/// Builds GF(p^k). With no modulus, picks the smallest monic irreducible of
/// degree k, ordering candidates by the base-p integer of (c0, ..., c_{k-1})
/// with c_{k-1} most significant. Throws Error(reducible_polynomial),
/// Error(size_bound_exceeded), Error(non_prime_modulus).
ExtFieldPtr make_ext_field(std::uint64_t p, unsigned k,
                           std::optional<std::vector<Residue>> modulus = std::nullopt,
                           std::uint64_t bound = kDefaultEnumerationBound);

ExtElement ext_add(const ExtElement& a, const ExtElement& b);
ExtElement ext_sub(const ExtElement& a, const ExtElement& b);
ExtElement ext_mul(const ExtElement& a, const ExtElement& b);
ExtElement ext_pow(const ExtElement& a, std::uint64_t e);
/// Evaluates an integer polynomial (coefficients reduced mod p) at a point of
/// GF(p^k)^n.
ExtElement ext_eval_poly(const Polynomial& f, std::span<const ExtElement> point);

}  // namespace trapdyn
