#include "trapdyn/poly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "trapdyn/error.hpp"
#include "trapdyn/modfield.hpp"

namespace trapdyn {

namespace {

Coefficient checked_add(Coefficient a, Coefficient b) {
  Coefficient r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw Error(ErrorCode::coefficient_overflow, "coefficient overflow in addition");
  }
  return r;
}

Coefficient checked_mul(Coefficient a, Coefficient b) {
  Coefficient r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw Error(ErrorCode::coefficient_overflow, "coefficient overflow in multiplication");
  }
  return r;
}

void require_same_vars(const Polynomial& a, const Polynomial& b) {
  if (a.num_vars() != b.num_vars()) {
    throw Error(ErrorCode::dimension_mismatch, "polynomials over different variable counts");
  }
}

}  // namespace

unsigned Monomial::total_degree() const noexcept {
  return std::accumulate(exponents.begin(), exponents.end(), 0u);
}

int compare_graded_lex(const Exponents& a, const Exponents& b) noexcept {
  const unsigned da = std::accumulate(a.begin(), a.end(), 0u);
  const unsigned db = std::accumulate(b.begin(), b.end(), 0u);
  if (da != db) return da < db ? -1 : 1;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

Polynomial::Polynomial(std::size_t num_vars) : num_vars_(num_vars) {
  if (num_vars == 0) {
    throw Error(ErrorCode::dimension_mismatch, "polynomial needs at least one variable");
  }
}

Polynomial Polynomial::from_terms(std::size_t num_vars, std::vector<Monomial> terms) {
  Polynomial out(num_vars);
  for (const auto& t : terms) {
    if (t.exponents.size() != num_vars) {
      throw Error(ErrorCode::dimension_mismatch, "monomial exponent length does not match num_vars");
    }
  }
  std::sort(terms.begin(), terms.end(), [](const Monomial& a, const Monomial& b) {
    return compare_graded_lex(a.exponents, b.exponents) > 0;
  });
  for (auto& t : terms) {
    if (!out.terms_.empty() && out.terms_.back().exponents == t.exponents) {
      out.terms_.back().coefficient = checked_add(out.terms_.back().coefficient, t.coefficient);
    } else {
      out.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(out.terms_, [](const Monomial& m) { return m.coefficient == 0; });
  return out;
}

Polynomial Polynomial::constant(std::size_t num_vars, Coefficient c) {
  return from_terms(num_vars, {Monomial{Exponents(num_vars, 0), c}});
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index) {
  if (index >= num_vars) {
    throw Error(ErrorCode::variable_out_of_range, "variable index out of range");
  }
  Exponents e(num_vars, 0);
  e[index] = 1;
  return from_terms(num_vars, {Monomial{std::move(e), 1}});
}

unsigned Polynomial::degree() const noexcept {
  // Terms are sorted by descending total degree.
  return terms_.empty() ? 0 : terms_.front().total_degree();
}

bool Polynomial::is_homogeneous() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [d = degree()](const Monomial& m) { return m.total_degree() == d; });
}

Coefficient Polynomial::max_abs_coefficient() const noexcept {
  Coefficient best = 0;
  for (const auto& t : terms_) {
    const Coefficient a = t.coefficient < 0 ? -t.coefficient : t.coefficient;
    best = std::max(best, a);
  }
  return best;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& t : out.terms_) t.coefficient = checked_mul(t.coefficient, -1);
  return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  require_same_vars(a, b);
  std::vector<Monomial> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return Polynomial::from_terms(a.num_vars_, std::move(terms));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require_same_vars(a, b);
  std::vector<Monomial> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      Exponents e(a.num_vars_);
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = s.exponents[i] + t.exponents[i];
      }
      terms.push_back(Monomial{std::move(e), checked_mul(s.coefficient, t.coefficient)});
    }
  }
  return Polynomial::from_terms(a.num_vars_, std::move(terms));
}

Polynomial Polynomial::pow(std::uint32_t e) const {
  Polynomial result = constant(num_vars_, 1);
  Polynomial base = *this;
  while (e != 0) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e != 0) base = base * base;
  }
  return result;
}

std::string variable_name(std::size_t index, std::size_t num_vars) {
  if (num_vars <= 2) return index == 0 ? "x" : "y";
  return "x" + std::to_string(index + 1);
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    Coefficient c = t.coefficient;
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    // Unsigned magnitude so INT64_MIN prints correctly.
    const std::uint64_t mag = c < 0 ? 0 - static_cast<std::uint64_t>(c) : static_cast<std::uint64_t>(c);
    const bool is_const = t.total_degree() == 0;
    bool need_star = false;
    if (mag != 1 || is_const) {
      out << mag;
      need_star = true;
    }
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (t.exponents[i] == 0) continue;
      if (need_star) out << "*";
      out << variable_name(i, num_vars_);
      if (t.exponents[i] > 1) out << "^" << t.exponents[i];
      need_star = true;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t num_vars) : text_(text), n_(num_vars) {}

  Polynomial run() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::syntax, "syntax error at position " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_primary(char c) const {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '(';
  }

  Polynomial expr() {
    Polynomial acc(n_);
    bool first = true;
    for (;;) {
      char c = peek();
      bool negate = false;
      if (c == '+' || c == '-') {
        negate = c == '-';
        ++pos_;
      } else if (!first) {
        break;
      }
      Polynomial t = term();
      acc = negate ? acc - t : acc + t;
      first = false;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (starts_primary(c)) {
        acc = acc * factor();
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial factor() {
    if (peek() == '-') {
      ++pos_;
      return -factor();
    }
    Polynomial base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      std::uint64_t e = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        e = e * 10 + static_cast<unsigned>(text_[pos_] - '0');
        if (e > kMaxExponent) fail("exponent too large");
        ++pos_;
      }
      if (pos_ == start) fail("expected non-negative integer exponent");
      base = base.pow(static_cast<std::uint32_t>(e));
    }
    return base;
  }

  Polynomial primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Coefficient v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, text_[pos_] - '0', &v)) {
          throw Error(ErrorCode::coefficient_overflow,
                      "integer literal too large at position " + std::to_string(pos_));
        }
        ++pos_;
      }
      return Polynomial::constant(n_, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      ++pos_;
      std::size_t digits_start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      std::size_t index = 0;
      if (name == "x" && n_ <= 2) {
        index = 0;
      } else if (name == "y" && n_ <= 2) {
        index = 1;
      } else if (c == 'x' && pos_ > digits_start) {
        const std::string digits(text_.substr(digits_start, pos_ - digits_start));
        if (digits.size() > 9) {
          pos_ = start;
          fail("variable index too large");
        }
        const unsigned long k = std::stoul(digits);
        if (k == 0) {
          pos_ = start;
          fail("variables are numbered from x1");
        }
        index = k - 1;
      } else {
        pos_ = start;
        fail("unknown variable '" + std::string(name) + "'");
      }
      if (index >= n_) {
        throw Error(ErrorCode::variable_out_of_range,
                    "variable '" + std::string(name) + "' at position " + std::to_string(start) +
                        " out of range for " + std::to_string(n_) + " variable(s)");
      }
      return Polynomial::variable(n_, index);
    }
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  static constexpr std::uint64_t kMaxExponent = 1u << 16;

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse(std::string_view text, std::size_t num_vars, const ParseOptions& options) {
  Polynomial p = Parser(text, num_vars).run();
  if (p.max_abs_coefficient() > options.coefficient_bound) {
    throw Error(ErrorCode::coefficient_overflow,
                "coefficient exceeds configured bound " + std::to_string(options.coefficient_bound));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Points and maps
// ---------------------------------------------------------------------------

Point::Point(std::vector<Residue> c, Residue p) : coords(std::move(c)), modulus(p) {
  for (Residue r : coords) {
    if (r >= p) {
      throw Error(ErrorCode::out_of_range, "coordinate " + std::to_string(r) + " not reduced mod " +
                                               std::to_string(p));
    }
  }
}

bool Point::is_zero() const noexcept {
  return std::all_of(coords.begin(), coords.end(), [](Residue r) { return r == 0; });
}

std::string Point::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coords[i]);
  }
  return s + ")";
}

PolyMap::PolyMap(std::vector<Polynomial> comps, std::string label)
    : num_vars(comps.empty() ? 0 : comps.front().num_vars()),
      components(std::move(comps)),
      name(std::move(label)) {
  if (components.empty() || components.size() != num_vars) {
    throw Error(ErrorCode::dimension_mismatch, "a map on n variables needs exactly n components");
  }
  for (const auto& c : components) {
    if (c.num_vars() != num_vars) {
      throw Error(ErrorCode::dimension_mismatch, "map components disagree on num_vars");
    }
  }
}

std::string PolyMap::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) s += ", ";
    s += components[i].to_string();
  }
  return s + ")";
}

std::string_view builtin_name(BuiltinMap which) noexcept {
  switch (which) {
    case BuiltinMap::additive_trap: return "additive_trap";
    case BuiltinMap::multiplicative_trap: return "multiplicative_trap";
    case BuiltinMap::power_trap: return "power_trap";
  }
  return "";
}

std::optional<BuiltinMap> builtin_from_name(std::string_view name) noexcept {
  for (auto m : {BuiltinMap::additive_trap, BuiltinMap::multiplicative_trap, BuiltinMap::power_trap}) {
    if (builtin_name(m) == name) return m;
  }
  return std::nullopt;
}

PolyMap builtin(BuiltinMap which) {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);
  const Polynomial two = Polynomial::constant(2, 2);
  switch (which) {
    case BuiltinMap::additive_trap:
      return PolyMap({x * x * y, x * x * y + x * y * y}, "additive_trap");
    case BuiltinMap::multiplicative_trap:
      return PolyMap({x * x * y * (x - y), two * x * y * y * (x - y)}, "multiplicative_trap");
    case BuiltinMap::power_trap:
      return PolyMap({x.pow(3) * y * (x - y), x * y.pow(3) * (x - y)}, "power_trap");
  }
  throw Error(ErrorCode::unknown_map, "unknown builtin map");
}

PolyMap builtin(std::string_view name) {
  if (auto m = builtin_from_name(name)) return builtin(*m);
  throw Error(ErrorCode::unknown_map, "unknown map '" + std::string(name) +
                                          "' (expected additive_trap, multiplicative_trap or power_trap)");
}

PolyMap identity_map(std::size_t num_vars) {
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < num_vars; ++i) comps.push_back(Polynomial::variable(num_vars, i));
  return PolyMap(std::move(comps), "identity");
}

PolyMap parse_map(std::string_view text, const ParseOptions& options) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n' || c == ';') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  lines.push_back(cur);
  std::vector<std::string> comps;
  for (auto& l : lines) {
    if (auto hash = l.find('#'); hash != std::string::npos) l.erase(hash);
    if (std::all_of(l.begin(), l.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    comps.push_back(l);
  }
  if (comps.empty()) throw Error(ErrorCode::syntax, "map text has no components");
  std::vector<Polynomial> polys;
  for (const auto& c : comps) polys.push_back(parse(c, comps.size(), options));
  return PolyMap(std::move(polys));
}

Residue evaluate_mod(const Polynomial& poly, const Point& point) {
  if (point.dim() != poly.num_vars()) {
    throw Error(ErrorCode::dimension_mismatch, "point dimension " + std::to_string(point.dim()) +
                                                   " does not match polynomial in " +
                                                   std::to_string(poly.num_vars()) + " variables");
  }
  const Residue p = point.modulus;
  Residue acc = 0;
  for (const auto& t : poly.terms()) {
    Residue term = reduce(t.coefficient, p);
    for (std::size_t i = 0; i < t.exponents.size() && term != 0; ++i) {
      if (t.exponents[i] != 0) term = mod_mul(term, mod_pow(point.coords[i], t.exponents[i], p), p);
    }
    acc = mod_add(acc, term, p);
  }
  return acc;
}

Point map_evaluate(const PolyMap& map, const Point& point) {
  if (point.dim() != map.num_vars) {
    throw Error(ErrorCode::dimension_mismatch, "point dimension does not match map");
  }
  Point out;
  out.modulus = point.modulus;
  out.coords.reserve(map.num_vars);
  for (const auto& c : map.components) out.coords.push_back(evaluate_mod(c, point));
  return out;
}

unsigned degree(const Polynomial& poly) noexcept { return poly.degree(); }

bool is_homogeneous(const PolyMap& map) noexcept {
  if (map.components.empty()) return true;
  const unsigned d = map.components.front().degree();
  return std::all_of(map.components.begin(), map.components.end(), [d](const Polynomial& c) {
    return c.is_homogeneous() && c.degree() == d;
  });
}

}  // namespace trapdyn
