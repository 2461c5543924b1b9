#include "trapdyn/search.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <ostream>
#include <sstream>

#include "trapdyn/error.hpp"
#include "trapdyn/modfield.hpp"
#include "trapdyn/parallel.hpp"

namespace trapdyn {

namespace {

constexpr std::uint64_t kMaxComponents = 50'000'000;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::invalid_config, msg); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::int64_t parse_int(std::string_view s, std::string_view key) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    config_error("bad integer '" + t + "' for key '" + std::string(key) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s, std::string_view key) {
  const std::int64_t v = parse_int(s, key);
  if (v < 0) config_error("key '" + std::string(key) + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::int64_t> parse_int_list(std::string_view s, std::string_view key) {
  std::vector<std::int64_t> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(parse_int(s.substr(start, comma - start), key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::pair<std::int64_t, std::int64_t> parse_range(std::string_view s, std::string_view key) {
  // "lo..hi"; a leading '-' belongs to lo.
  const auto dots = s.find("..");
  if (dots == std::string_view::npos) config_error("expected lo..hi for key '" + std::string(key) + "'");
  return {parse_int(s.substr(0, dots), key), parse_int(s.substr(dots + 2), key)};
}

Point to_residue_point(const IntPoint& pt, Residue p) {
  std::vector<Residue> coords(pt.size());
  for (std::size_t i = 0; i < pt.size(); ++i) coords[i] = reduce(pt[i], p);
  return Point(std::move(coords), p);
}

std::uint64_t saturating_pow(std::uint64_t base, std::size_t n) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r *= base;
  }
  return r;
}

std::vector<Exponents> monomials_up_to(std::size_t n, unsigned max_degree) {
  std::vector<Exponents> out;
  Exponents cur(n, 0);
  auto rec = [&](auto&& self, std::size_t var, unsigned left) -> void {
    if (var == n) {
      out.push_back(cur);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) {
      cur[var] = e;
      self(self, var + 1, left - e);
    }
    cur[var] = 0;
  };
  rec(rec, 0, max_degree);
  std::sort(out.begin(), out.end(),
            [](const Exponents& a, const Exponents& b) { return compare_graded_lex(a, b) < 0; });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void SearchConfig::validate() const {
  if (num_vars == 0) config_error("num_vars must be positive");
  if (fixed_a.size() != num_vars || fixed_b.size() != num_vars) {
    config_error("fixed points must have num_vars coordinates");
  }
  if (fixed_a == fixed_b) config_error("fixed points A and B must differ");
  if (fixed_a.front() != 0) config_error("fixed point A must have first coordinate 0");
  if (fixed_b.front() == 0) config_error("fixed point B must have nonzero first coordinate");
  if (coefficient_lo > coefficient_hi) config_error("empty coefficient range");
  for (auto p : primes) {
    if (!is_prime(p)) config_error(std::to_string(p) + " is not prime");
  }
  if (iteration_budget == 0) config_error("iteration_budget must be positive");
  if (uniform_bound && !(*uniform_bound > 0)) config_error("uniform_bound must be positive");
}

SearchConfig parse_search_config(std::string_view text) {
  SearchConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "num_vars") {
      cfg.num_vars = parse_uint(value, key);
    } else if (key == "max_degree") {
      cfg.max_degree = static_cast<unsigned>(parse_uint(value, key));
    } else if (key == "coefficient_range") {
      std::tie(cfg.coefficient_lo, cfg.coefficient_hi) = parse_range(value, key);
    } else if (key == "coefficient_lo") {
      cfg.coefficient_lo = parse_int(value, key);
    } else if (key == "coefficient_hi") {
      cfg.coefficient_hi = parse_int(value, key);
    } else if (key == "max_terms") {
      cfg.max_terms = parse_uint(value, key);
    } else if (key == "primes") {
      cfg.primes.clear();
      if (value.find("..") != std::string::npos) {
        const auto [lo, hi] = parse_range(value, key);
        for (std::int64_t v = std::max<std::int64_t>(lo, 2); v <= hi; ++v) {
          if (is_prime(static_cast<std::uint64_t>(v))) cfg.primes.push_back(static_cast<std::uint64_t>(v));
        }
      } else {
        for (auto v : parse_int_list(value, key)) {
          if (v < 0) config_error("negative prime");
          cfg.primes.push_back(static_cast<std::uint64_t>(v));
        }
      }
    } else if (key == "fixed_a") {
      cfg.fixed_a = parse_int_list(value, key);
    } else if (key == "fixed_b") {
      cfg.fixed_b = parse_int_list(value, key);
    } else if (key == "iteration_budget") {
      cfg.iteration_budget = parse_uint(value, key);
    } else if (key == "candidate_budget") {
      cfg.candidate_budget = parse_uint(value, key);
    } else if (key == "uniform_bound") {
      try {
        cfg.uniform_bound = std::stod(value);
      } catch (const std::exception&) {
        config_error("bad number for uniform_bound");
      }
    } else if (key == "jobs") {
      cfg.jobs = static_cast<unsigned>(parse_uint(value, key));
    } else {
      config_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string to_config_text(const SearchConfig& c) {
  auto join = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  std::ostringstream out;
  out << "num_vars = " << c.num_vars << '\n'
      << "max_degree = " << c.max_degree << '\n'
      << "coefficient_range = " << c.coefficient_lo << ".." << c.coefficient_hi << '\n'
      << "max_terms = " << c.max_terms << '\n'
      << "primes = " << join(c.primes) << '\n'
      << "fixed_a = " << join(c.fixed_a) << '\n'
      << "fixed_b = " << join(c.fixed_b) << '\n'
      << "iteration_budget = " << c.iteration_budget << '\n'
      << "candidate_budget = " << c.candidate_budget << '\n';
  if (c.uniform_bound) out << "uniform_bound = " << *c.uniform_bound << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

std::vector<Polynomial> enumerate_components(const SearchConfig& config) {
  const auto monos = monomials_up_to(config.num_vars, config.max_degree);
  std::vector<Coefficient> values;
  for (Coefficient c = config.coefficient_lo; c <= config.coefficient_hi; ++c) {
    if (c != 0) values.push_back(c);
    if (c == std::numeric_limits<Coefficient>::max()) break;
  }

  std::vector<Polynomial> out;
  const std::size_t m = monos.size();
  const std::size_t max_terms = std::min(config.max_terms, values.empty() ? 0 : m);
  out.push_back(Polynomial(config.num_vars));
  for (std::size_t t = 1; t <= max_terms; ++t) {
    std::vector<std::size_t> idx(t);
    for (std::size_t i = 0; i < t; ++i) idx[i] = i;
    for (;;) {
      std::vector<std::size_t> coef(t, 0);
      for (;;) {
        std::vector<Monomial> terms;
        terms.reserve(t);
        for (std::size_t i = 0; i < t; ++i) terms.push_back({monos[idx[i]], values[coef[i]]});
        out.push_back(Polynomial::from_terms(config.num_vars, std::move(terms)));
        if (out.size() > kMaxComponents) config_error("component space too large; tighten the bounds");
        std::size_t pos = t;
        while (pos > 0 && coef[pos - 1] + 1 == values.size()) coef[--pos] = 0;
        if (pos == 0) break;
        ++coef[pos - 1];
      }
      // Next t-combination of [0, m) in lexicographic order.
      std::size_t pos = t;
      while (pos > 0 && idx[pos - 1] == m - t + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < t; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

CandidateStream::CandidateStream(const SearchConfig& config)
    : num_vars_(config.num_vars), components_(enumerate_components(config)) {
  total_ = std::min(config.candidate_budget, saturating_pow(components_.size(), num_vars_));
}

std::optional<PolyMap> CandidateStream::next() {
  if (index_ >= total_) return std::nullopt;
  std::uint64_t rest = index_++;
  std::vector<Polynomial> comps(num_vars_, Polynomial(num_vars_));
  for (std::size_t j = num_vars_; j-- > 0;) {
    comps[j] = components_[rest % components_.size()];
    rest /= components_.size();
  }
  return PolyMap(std::move(comps));
}

// ---------------------------------------------------------------------------
// Exact evaluation and per-prime checks
// ---------------------------------------------------------------------------

std::int64_t evaluate_exact(const Polynomial& poly, const IntPoint& point) {
  if (point.size() != poly.num_vars()) throw Error(ErrorCode::dimension_mismatch, "point dimension mismatch");
  auto overflow = [] { return Error(ErrorCode::exact_range_exceeded, "value exceeds exact 64-bit range"); };
  std::int64_t acc = 0;
  for (const auto& t : poly.terms()) {
    std::int64_t term = t.coefficient;
    for (std::size_t i = 0; i < point.size(); ++i) {
      for (std::uint32_t e = 0; e < t.exponents[i]; ++e) {
        if (__builtin_mul_overflow(term, point[i], &term)) throw overflow();
      }
    }
    if (__builtin_add_overflow(acc, term, &acc)) throw overflow();
  }
  return acc;
}

bool is_fixed_over_Z(const PolyMap& map, const IntPoint& point) {
  if (point.size() != map.num_vars) throw Error(ErrorCode::dimension_mismatch, "point dimension mismatch");
  for (std::size_t j = 0; j < map.num_vars; ++j) {
    if (evaluate_exact(map.components[j], point) != point[j]) return false;
  }
  return true;
}

namespace {

// Shared core: `want(i)` gives the index of the fixed point that point i must
// reach; `fixed` lists the allowed cycles.
template <class Want>
PrimeVerdict check_routing(const PolyMap& map, Residue p, const std::vector<Point>& fixed, std::uint64_t budget,
                           const GraphOptions& graph, Want&& want) {
  PrimeVerdict v;
  v.p = p;
  for (const auto& f : fixed) {
    if (map_evaluate(map, f) != f) {
      throw Error(ErrorCode::not_fixed_mod_p, f.to_string() + " is not fixed mod " + std::to_string(p));
    }
  }
  const FunctionalGraph g = build_graph(map, p, graph);
  std::vector<std::uint32_t> fixed_basin;
  for (const auto& f : fixed) fixed_basin.push_back(g.basin_id()[point_index(f)]);

  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::uint32_t target_basin = fixed_basin[want(i)];
    if (g.basin_id()[i] == target_basin) continue;
    const bool other_cycle =
        std::find(fixed_basin.begin(), fixed_basin.end(), g.basin_id()[i]) == fixed_basin.end();
    v.sorts_correctly = false;
    v.failure_witness = point_of_index(i, p, map.num_vars);
    v.reason = other_cycle ? "enters a cycle other than the declared fixed points"
                           : "reaches the wrong fixed point";
    return v;
  }
  v.required_iterate = g.max_tail_depth();
  if (*v.required_iterate > budget) {
    v.sorts_correctly = false;
    v.reason = "required iterate exceeds the iteration budget";
    const auto& depth = g.tail_depth();
    v.failure_witness =
        point_of_index(static_cast<std::uint64_t>(std::max_element(depth.begin(), depth.end()) - depth.begin()), p,
                       map.num_vars);
    return v;
  }
  v.sorts_correctly = true;
  return v;
}

}  // namespace

PrimeVerdict sorts_by_first_coordinate(const PolyMap& map, std::uint64_t p_in, const IntPoint& a, const IntPoint& b,
                                       std::uint64_t budget, const GraphOptions& graph) {
  require_prime(p_in);
  if (budget == 0) throw Error(ErrorCode::out_of_range, "iteration budget must be positive");
  const auto p = static_cast<Residue>(p_in);
  const Point pa = to_residue_point(a, p);
  const Point pb = to_residue_point(b, p);
  if (pa == pb) {
    PrimeVerdict v;
    v.p = p;
    v.sorts_correctly = true;
    v.degenerate = true;
    v.reason = "declared fixed points coincide mod p";
    return v;
  }
  std::uint64_t row = 1;
  for (std::size_t i = 1; i < map.num_vars; ++i) row *= p;
  return check_routing(map, p, {pa, pb}, budget, graph,
                       [row](std::size_t i) -> std::size_t { return i / row == 0 ? 0 : 1; });
}

PrimeVerdict attracts_everything(const PolyMap& map, std::uint64_t p_in, const IntPoint& target,
                                 std::uint64_t budget, const GraphOptions& graph) {
  require_prime(p_in);
  const auto p = static_cast<Residue>(p_in);
  return check_routing(map, p, {to_residue_point(target, p)}, budget, graph,
                       [](std::size_t) -> std::size_t { return 0; });
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

SearchResult run_search(const SearchConfig& config) {
  config.validate();
  const std::vector<Polynomial> comps = enumerate_components(config);
  const std::size_t n = config.num_vars;
  const std::uint64_t base = comps.size();

  SearchResult result;
  SearchSummary& s = result.summary;
  s.candidate_space = saturating_pow(base, n);
  s.tested = std::min(config.candidate_budget, s.candidate_space);
  s.no_primes_tested = config.primes.empty();

  // Fixed-over-Z decomposes by component: component j must send A and B to
  // their j-th coordinates.
  enum Status : unsigned char { fixed = 0, not_fixed = 1, overflow = 2 };
  std::vector<std::vector<Status>> status(n, std::vector<Status>(base));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < base; ++c) {
      try {
        const bool ok = evaluate_exact(comps[c], config.fixed_a) == config.fixed_a[j] &&
                        evaluate_exact(comps[c], config.fixed_b) == config.fixed_b[j];
        status[j][c] = ok ? fixed : not_fixed;
      } catch (const Error&) {
        status[j][c] = overflow;
      }
    }
  }

  std::vector<std::uint64_t> survivors;
  std::vector<std::size_t> tuple(n);
  for (std::uint64_t idx = 0; idx < s.tested; ++idx) {
    std::uint64_t rest = idx;
    unsigned worst = fixed;
    for (std::size_t j = n; j-- > 0;) {
      worst = std::max<unsigned>(worst, status[j][rest % base]);
      rest /= base;
    }
    if (worst == overflow) {
      ++s.rejected_exact_range;
    } else if (worst == not_fixed) {
      ++s.rejected_not_fixed;
    } else {
      survivors.push_back(idx);
    }
  }

  auto make_map = [&](std::uint64_t idx) {
    std::vector<Polynomial> cs(n, Polynomial(n));
    for (std::size_t j = n; j-- > 0;) {
      cs[j] = comps[idx % base];
      idx /= base;
    }
    return PolyMap(std::move(cs));
  };

  GraphOptions graph;
  graph.jobs = 1;
  std::vector<CandidateVerdict> verdicts(survivors.size());
  parallel_for(survivors.size(), config.jobs, [&](std::size_t k) {
    CandidateVerdict& v = verdicts[k];
    v.index = survivors[k];
    v.map = make_map(survivors[k]);
    v.fixed_over_Z = true;
    v.pass = true;
    for (std::uint64_t p : config.primes) {
      PrimeVerdict pv;
      try {
        pv = sorts_by_first_coordinate(v.map, p, config.fixed_a, config.fixed_b, config.iteration_budget, graph);
      } catch (const Error& e) {
        pv.p = p;
        pv.sorts_correctly = false;
        pv.reason = e.what();
      }
      if (config.uniform_bound && pv.required_iterate) {
        pv.within_uniform_bound = static_cast<double>(*pv.required_iterate) <= *config.uniform_bound * static_cast<double>(p);
      }
      const bool ok = pv.sorts_correctly;
      v.per_prime.push_back(std::move(pv));
      if (!ok) {
        v.pass = false;
        break;
      }
    }
  });

  for (auto& v : verdicts) {
    for (const auto& pv : v.per_prime) s.degenerate_prime_checks += pv.degenerate;
    if (v.pass) {
      ++s.passed;
      result.passes.push_back(std::move(v));
    } else {
      ++s.rejected_at_prime[v.per_prime.back().p];
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

nlohmann::ordered_json to_json(const PrimeVerdict& v) {
  nlohmann::ordered_json j;
  j["p"] = v.p;
  j["sorts_correctly"] = v.sorts_correctly;
  j["degenerate"] = v.degenerate;
  j["required_iterate"] = v.required_iterate ? nlohmann::ordered_json(*v.required_iterate) : nullptr;
  j["failure_witness"] = v.failure_witness ? nlohmann::ordered_json(v.failure_witness->coords) : nullptr;
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.within_uniform_bound) j["within_uniform_bound"] = *v.within_uniform_bound;
  return j;
}

nlohmann::ordered_json to_json(const CandidateVerdict& v) {
  nlohmann::ordered_json j;
  j["index"] = v.index;
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (const auto& c : v.map.components) comps.push_back(c.to_string());
  j["map"] = comps;
  j["fixed_over_Z"] = v.fixed_over_Z;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& pv : v.per_prime) per.push_back(to_json(pv));
  j["per_prime"] = per;
  j["overall"] = v.pass ? "pass" : "fail";
  return j;
}

nlohmann::ordered_json to_json(const SearchSummary& s) {
  nlohmann::ordered_json j;
  j["candidate_space"] = s.candidate_space;
  j["tested"] = s.tested;
  j["rejected_not_fixed"] = s.rejected_not_fixed;
  j["rejected_exact_range"] = s.rejected_exact_range;
  nlohmann::ordered_json at = nlohmann::ordered_json::object();
  for (const auto& [p, c] : s.rejected_at_prime) at[std::to_string(p)] = c;
  j["rejected_at_prime"] = at;
  j["degenerate_prime_checks"] = s.degenerate_prime_checks;
  j["passed"] = s.passed;
  j["no_primes_tested"] = s.no_primes_tested;
  return j;
}

void write_verdict_stream(std::ostream& out, const SearchResult& result) {
  for (const auto& v : result.passes) out << to_json(v).dump() << '\n';
  nlohmann::ordered_json line;
  line["summary"] = to_json(result.summary);
  out << line.dump() << '\n';
}

}  // namespace trapdyn
