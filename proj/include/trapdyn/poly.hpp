#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trapdyn {

using Residue = std::uint32_t;
using Coefficient = std::int64_t;
using Exponents = std::vector<std::uint32_t>;

inline constexpr Coefficient kDefaultCoefficientBound = 2147483647;  // 2^31 - 1

struct Monomial {
  Exponents exponents;
  Coefficient coefficient = 0;

  unsigned total_degree() const noexcept;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Graded-lex comparison on exponent vectors: higher total degree first, ties
// broken lexicographically (x before y). Returns <0, 0, >0 like strcmp, with
// "greater" meaning "printed earlier".
int compare_graded_lex(const Exponents& a, const Exponents& b) noexcept;

/// Sparse multivariate polynomial with exact integer coefficients.
///
/// Canonical form: terms sorted in descending graded-lex order, no duplicate
/// exponent vectors, no zero coefficients. The zero polynomial has an empty
/// term list and degree 0.
class Polynomial {
 public:
  explicit Polynomial(std::size_t num_vars);

  /// Builds the canonical form from arbitrary terms (merges duplicates, drops
  /// zeros). Throws on exponent-length mismatch or int64 overflow.
  static Polynomial from_terms(std::size_t num_vars, std::vector<Monomial> terms);
  static Polynomial constant(std::size_t num_vars, Coefficient c);
  static Polynomial variable(std::size_t num_vars, std::size_t index);

  std::size_t num_vars() const noexcept { return num_vars_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  unsigned degree() const noexcept;
  bool is_homogeneous() const noexcept;
  Coefficient max_abs_coefficient() const noexcept;

  Polynomial operator-() const;
  Polynomial pow(std::uint32_t e) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Canonical text in the parser grammar; parse(to_string()) == *this.
  std::string to_string() const;

 private:
  std::size_t num_vars_;
  std::vector<Monomial> terms_;
};

struct ParseOptions {
  Coefficient coefficient_bound = kDefaultCoefficientBound;
};

/// Parses `text` over `num_vars` variables. Variables are x, y (n <= 2) or
/// x1..xn; x and y alias x1 and x2. Operators: + - * ^, parentheses, and
/// juxtaposition as multiplication ("2x^2y").
Polynomial parse(std::string_view text, std::size_t num_vars, const ParseOptions& options = {});

std::string variable_name(std::size_t index, std::size_t num_vars);

/// A point of F_p^n; coordinates fully reduced.
struct Point {
  std::vector<Residue> coords;
  Residue modulus = 0;

  Point() = default;
  Point(std::vector<Residue> c, Residue p);

  std::size_t dim() const noexcept { return coords.size(); }
  bool is_zero() const noexcept;
  std::string to_string() const;
  friend bool operator==(const Point&, const Point&) = default;
};

struct PolyMap {
  std::size_t num_vars = 0;
  std::vector<Polynomial> components;
  std::string name;

  PolyMap() = default;
  PolyMap(std::vector<Polynomial> comps, std::string label = {});

  std::string to_string() const;
  friend bool operator==(const PolyMap& a, const PolyMap& b) {
    return a.components == b.components;
  }
};

enum class BuiltinMap { additive_trap, multiplicative_trap, power_trap };

std::string_view builtin_name(BuiltinMap which) noexcept;
std::optional<BuiltinMap> builtin_from_name(std::string_view name) noexcept;
PolyMap builtin(BuiltinMap which);
/// Throws Error(unknown_map) for unrecognized names.
PolyMap builtin(std::string_view name);

/// Identity map on n variables.
PolyMap identity_map(std::size_t num_vars);

/// Parses a map from one component per line (or ';'-separated); the number of
/// components fixes the number of variables.
PolyMap parse_map(std::string_view text, const ParseOptions& options = {});

Residue evaluate_mod(const Polynomial& poly, const Point& point);
Point map_evaluate(const PolyMap& map, const Point& point);

unsigned degree(const Polynomial& poly) noexcept;
bool is_homogeneous(const PolyMap& map) noexcept;

}  // namespace trapdyn
