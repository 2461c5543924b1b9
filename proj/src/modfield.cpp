#include "trapdyn/modfield.hpp"

#include <algorithm>
#include <bit>

#include "trapdyn/error.hpp"

namespace trapdyn {

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

void require_prime(std::uint64_t p) {
  if (!is_prime(p)) {
    throw Error(ErrorCode::non_prime_modulus, std::to_string(p) + " is not prime");
  }
}

Residue mod_pow(Residue a, std::uint64_t e, Residue p) noexcept {
  std::uint64_t result = 1 % p;
  std::uint64_t base = a % p;
  while (e != 0) {
    if (e & 1u) result = result * base % p;
    e >>= 1;
    if (e != 0) base = base * base % p;
  }
  return static_cast<Residue>(result);
}

Residue mod_inv(Residue a, Residue p) {
  if (a % p == 0) throw Error(ErrorCode::zero_inverse, "0 has no inverse mod " + std::to_string(p));
  // Extended Euclid on signed 64-bit; p < 2^32 keeps everything in range.
  std::int64_t r0 = p, r1 = a % p, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::int64_t t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  return reduce(s0, p);
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t d = 2; d <= n / d; d += (d == 2 ? 1 : 2)) {
    unsigned m = 0;
    while (n % d == 0) {
      n /= d;
      ++m;
    }
    if (m) out.emplace_back(d, m);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::uint64_t mult_order(Residue a, Residue p) {
  if (a % p == 0) throw Error(ErrorCode::zero_argument, "multiplicative order of 0 is undefined");
  // Start from the group order and strip prime factors while the power
  // still gives 1.
  std::uint64_t order = p - 1;
  for (const auto& [q, m] : factorize(p - 1)) {
    for (unsigned i = 0; i < m; ++i) {
      if (mod_pow(a, order / q, p) == 1) {
        order /= q;
      } else {
        break;
      }
    }
  }
  return order;
}

bool is_primitive_root(Residue a, Residue p) { return mult_order(a, p) == p - 1; }

bool is_two_primary(std::uint64_t n) noexcept { return n != 0 && std::has_single_bit(n); }

std::optional<unsigned> fermat_exponent(std::uint64_t p) noexcept {
  if (p < 3 || !is_two_primary(p - 1)) return std::nullopt;
  return static_cast<unsigned>(std::countr_zero(p - 1));
}

std::vector<Residue> cyclic_subgroup(Residue g, Residue p) {
  if (g % p == 0) throw Error(ErrorCode::zero_argument, "0 does not generate a subgroup of units");
  std::vector<Residue> out;
  Residue cur = 1;
  do {
    out.push_back(cur);
    cur = mod_mul(cur, g, p);
  } while (cur != 1);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials over F_p as coefficient vectors, low to high.
// ---------------------------------------------------------------------------

namespace {

using Coeffs = std::vector<Residue>;

void trim(Coeffs& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo monic m.
Coeffs poly_rem(Coeffs a, std::span<const Residue> monic, Residue p) {
  trim(a);
  const std::size_t dm = monic.size() - 1;
  while (a.size() > dm) {
    const Residue lead = a.back();
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = mod_sub(a[shift + i], mod_mul(lead, monic[i], p), p);
    }
    trim(a);
  }
  return a;
}

}  // namespace

bool is_irreducible(std::span<const Residue> monic, Residue p) {
  if (monic.empty() || monic.back() != 1) {
    throw Error(ErrorCode::reducible_polynomial, "modulus must be monic");
  }
  const std::size_t k = monic.size() - 1;
  if (k == 0) return false;
  for (std::size_t d = 1; d <= k / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    Coeffs g(d + 1);
    g[d] = 1;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::uint64_t v = idx;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<Residue>(v % p);
        v /= p;
      }
      if (poly_rem(Coeffs(monic.begin(), monic.end()), g, p).empty()) return false;
    }
  }
  return true;
}

ExtField::ExtField(Residue p, std::vector<Residue> modulus)
    : p_(p), k_(static_cast<unsigned>(modulus.size() - 1)), size_(1), modulus_(std::move(modulus)) {
  for (unsigned i = 0; i < k_; ++i) size_ *= p_;
}

ExtFieldPtr make_ext_field(std::uint64_t p, unsigned k, std::optional<std::vector<Residue>> modulus,
                           std::uint64_t bound) {
  require_prime(p);
  if (k == 0) throw Error(ErrorCode::out_of_range, "extension degree must be positive");
  std::uint64_t size = 1;
  for (unsigned i = 0; i < k; ++i) {
    size *= p;
    if (size > bound) {
      throw Error(ErrorCode::size_bound_exceeded, "field size " + std::to_string(p) + "^" +
                                                      std::to_string(k) + " exceeds bound " +
                                                      std::to_string(bound));
    }
  }
  const auto pr = static_cast<Residue>(p);
  std::vector<Residue> chosen;
  if (modulus) {
    chosen = *modulus;
    for (auto& c : chosen) c %= pr;
    if (chosen.size() != k + 1 || chosen.back() != 1) {
      throw Error(ErrorCode::reducible_polynomial, "modulus must be monic of degree " + std::to_string(k));
    }
    if (!is_irreducible(chosen, pr)) {
      throw Error(ErrorCode::reducible_polynomial, "modulus is reducible over F_" + std::to_string(p));
    }
  } else {
    chosen.assign(k + 1, 0);
    chosen[k] = 1;
    for (std::uint64_t idx = 0; idx < size; ++idx) {
      std::uint64_t v = idx;
      for (unsigned i = 0; i < k; ++i) {
        chosen[i] = static_cast<Residue>(v % p);
        v /= p;
      }
      if (is_irreducible(chosen, pr)) break;
    }
  }
  return ExtFieldPtr(new ExtField(pr, std::move(chosen)));
}

std::string ExtField::modulus_string() const {
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < modulus_.size(); ++i) {
    if (modulus_[i]) terms.push_back(Monomial{{static_cast<std::uint32_t>(i)}, modulus_[i]});
  }
  std::string s = Polynomial::from_terms(1, std::move(terms)).to_string();
  std::replace(s.begin(), s.end(), 'x', 't');
  return s;
}

ExtElement ExtField::zero() const { return ExtElement{std::vector<Residue>(k_, 0), shared_from_this()}; }

ExtElement ExtField::one() const { return from_integer(1); }

ExtElement ExtField::from_integer(std::int64_t c) const {
  ExtElement e = zero();
  e.coeffs[0] = reduce(c, p_);
  // k = 1 with modulus t: constants are already canonical.
  return e;
}

ExtElement ExtField::element(std::uint64_t index) const {
  if (index >= size_) throw Error(ErrorCode::out_of_range, "element index out of range");
  ExtElement e = zero();
  for (unsigned i = 0; i < k_; ++i) {
    e.coeffs[i] = static_cast<Residue>(index % p_);
    index /= p_;
  }
  return e;
}

ExtElement ExtField::generator() const {
  ExtElement e = zero();
  if (k_ >= 2) {
    e.coeffs[1] = 1;
  } else {
    // t reduces to -modulus[0] when k = 1.
    e.coeffs[0] = mod_sub(0, modulus_[0], p_);
  }
  return e;
}

bool ExtElement::is_zero() const noexcept {
  return std::all_of(coeffs.begin(), coeffs.end(), [](Residue r) { return r == 0; });
}

std::uint64_t ExtElement::index() const noexcept {
  std::uint64_t idx = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) idx = idx * field->p() + coeffs[i];
  return idx;
}

std::string ExtElement::to_string() const {
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i]) terms.push_back(Monomial{{static_cast<std::uint32_t>(i)}, coeffs[i]});
  }
  std::string s = Polynomial::from_terms(1, std::move(terms)).to_string();
  std::replace(s.begin(), s.end(), 'x', 't');
  return s;
}

bool operator==(const ExtElement& a, const ExtElement& b) {
  return a.coeffs == b.coeffs && (a.field == b.field || (a.field && b.field && *a.field == *b.field));
}

namespace {

const ExtField& common_field(const ExtElement& a, const ExtElement& b) {
  if (!a.field || !b.field || !(a.field == b.field || *a.field == *b.field)) {
    throw Error(ErrorCode::field_mismatch, "elements belong to different fields");
  }
  return *a.field;
}

}  // namespace

ExtElement ext_add(const ExtElement& a, const ExtElement& b) {
  const ExtField& f = common_field(a, b);
  ExtElement out = a;
  for (unsigned i = 0; i < f.k(); ++i) out.coeffs[i] = mod_add(a.coeffs[i], b.coeffs[i], f.p());
  return out;
}

ExtElement ext_sub(const ExtElement& a, const ExtElement& b) {
  const ExtField& f = common_field(a, b);
  ExtElement out = a;
  for (unsigned i = 0; i < f.k(); ++i) out.coeffs[i] = mod_sub(a.coeffs[i], b.coeffs[i], f.p());
  return out;
}

ExtElement ext_mul(const ExtElement& a, const ExtElement& b) {
  const ExtField& f = common_field(a, b);
  const Residue p = f.p();
  const unsigned k = f.k();
  Coeffs prod(2 * k - 1, 0);
  for (unsigned i = 0; i < k; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (unsigned j = 0; j < k; ++j) {
      prod[i + j] = mod_add(prod[i + j], mod_mul(a.coeffs[i], b.coeffs[j], p), p);
    }
  }
  Coeffs rem = poly_rem(std::move(prod), f.modulus(), p);
  ExtElement out = a;
  std::fill(out.coeffs.begin(), out.coeffs.end(), 0);
  std::copy(rem.begin(), rem.end(), out.coeffs.begin());
  return out;
}

ExtElement ext_pow(const ExtElement& a, std::uint64_t e) {
  ExtElement result = a.field->one();
  ExtElement base = a;
  while (e != 0) {
    if (e & 1u) result = ext_mul(result, base);
    e >>= 1;
    if (e != 0) base = ext_mul(base, base);
  }
  return result;
}

ExtElement ext_eval_poly(const Polynomial& f, std::span<const ExtElement> point) {
  if (point.size() != f.num_vars()) {
    throw Error(ErrorCode::dimension_mismatch, "point dimension does not match polynomial");
  }
  if (point.empty()) throw Error(ErrorCode::dimension_mismatch, "empty point");
  const ExtFieldPtr& field = point.front().field;
  for (const auto& e : point) common_field(point.front(), e);
  ExtElement acc = field->zero();
  for (const auto& t : f.terms()) {
    ExtElement term = field->from_integer(t.coefficient);
    for (std::size_t i = 0; i < t.exponents.size() && !term.is_zero(); ++i) {
      if (t.exponents[i] != 0) term = ext_mul(term, ext_pow(point[i], t.exponents[i]));
    }
    acc = ext_add(acc, term);
  }
  return acc;
}

}  // namespace trapdyn
