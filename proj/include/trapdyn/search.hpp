#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trapdyn/dynamics.hpp"
#include "trapdyn/poly.hpp"

namespace trapdyn {

using IntPoint = std::vector<std::int64_t>;

/// Bounds of a search for maps with two fixed points A (first coordinate 0)
/// and B (first coordinate nonzero) that sort every point mod p by whether
/// its first coordinate vanishes.
///
/// Text form, one `key = value` per line, '#' comments:
///
///     num_vars = 2
///     max_degree = 4
///     coefficient_range = -2..2
///     max_terms = 2
///     primes = 2,3,5,7,11,13        # or a range: 2..13
///     fixed_a = 0,0
///     fixed_b = 1,0
///     iteration_budget = 4096
///     candidate_budget = 10000000
///     uniform_bound = 2.0           # optional, reporting only
struct SearchConfig {
  std::size_t num_vars = 2;
  unsigned max_degree = 4;
  Coefficient coefficient_lo = -2;
  Coefficient coefficient_hi = 2;
  std::size_t max_terms = 2;
  std::vector<std::uint64_t> primes = {2, 3, 5, 7, 11, 13};
  IntPoint fixed_a = {0, 0};
  IntPoint fixed_b = {1, 0};
  std::uint64_t iteration_budget = 4096;
  std::uint64_t candidate_budget = 10'000'000;
  std::optional<double> uniform_bound;
  unsigned jobs = 0;

  /// Throws Error(invalid_config) on a violated invariant.
  void validate() const;
};

SearchConfig parse_search_config(std::string_view text);
std::string to_config_text(const SearchConfig& config);

/// Deterministic stream of candidate maps.
///
/// Component polynomials are listed by term count (0 .. max_terms), then by
/// the ascending index tuple of their monomials (monomials of degree
/// <= max_degree in ascending graded-lex order, constant first), then by the
/// coefficient tuple with each coefficient running over the nonzero values
/// of the range in ascending order. Maps are tuples of components in
/// lexicographic order, first component most significant. The stream stops
/// after candidate_budget maps.
class CandidateStream {
 public:
  explicit CandidateStream(const SearchConfig& config);

  std::optional<PolyMap> next();
  /// Enumeration index of the map returned by the last next().
  std::uint64_t index() const noexcept { return index_ - 1; }
  /// Candidates the stream will emit in total.
  std::uint64_t total() const noexcept { return total_; }
  const std::vector<Polynomial>& components() const noexcept { return components_; }

 private:
  std::size_t num_vars_;
  std::vector<Polynomial> components_;
  std::uint64_t total_ = 0;
  std::uint64_t index_ = 0;
};

/// Every component polynomial admitted by the config, in stream order.
std::vector<Polynomial> enumerate_components(const SearchConfig& config);

/// Exact integer evaluation. Throws Error(exact_range_exceeded) on int64
/// overflow.
std::int64_t evaluate_exact(const Polynomial& poly, const IntPoint& point);
bool is_fixed_over_Z(const PolyMap& map, const IntPoint& point);

struct PrimeVerdict {
  std::uint64_t p = 0;
  bool sorts_correctly = false;
  bool degenerate = false;  // A == B mod p; counted as a pass
  std::optional<std::uint64_t> required_iterate;
  std::optional<Point> failure_witness;
  std::string reason;
  std::optional<bool> within_uniform_bound;
};

/// Builds the graph mod p and checks: A and B are the only cycles (both
/// fixed), points with x == 0 reach A, all others reach B, within `budget`
/// iterations. Throws Error(not_fixed_mod_p) if A or B moves.
PrimeVerdict sorts_by_first_coordinate(const PolyMap& map, std::uint64_t p, const IntPoint& a, const IntPoint& b,
                                       std::uint64_t budget, const GraphOptions& graph = {});

/// Single-attractor variant: every point reaches `target`, the only cycle.
PrimeVerdict attracts_everything(const PolyMap& map, std::uint64_t p, const IntPoint& target, std::uint64_t budget,
                                 const GraphOptions& graph = {});

struct CandidateVerdict {
  std::uint64_t index = 0;
  PolyMap map;
  bool fixed_over_Z = false;
  std::vector<PrimeVerdict> per_prime;
  bool pass = false;
};

struct SearchSummary {
  std::uint64_t candidate_space = 0;  // |components|^num_vars
  std::uint64_t tested = 0;
  std::uint64_t rejected_not_fixed = 0;
  std::uint64_t rejected_exact_range = 0;
  std::map<std::uint64_t, std::uint64_t> rejected_at_prime;
  std::uint64_t degenerate_prime_checks = 0;
  std::uint64_t passed = 0;
  bool no_primes_tested = false;
};

struct SearchResult {
  std::vector<CandidateVerdict> passes;
  SearchSummary summary;
};

/// Full pipeline: enumeration, fixed-over-Z filter (both points), then the
/// per-prime sorting check in config order, stopping at the first failing
/// prime. Output is ordered by enumeration index.
SearchResult run_search(const SearchConfig& config);

nlohmann::ordered_json to_json(const PrimeVerdict& v);
nlohmann::ordered_json to_json(const CandidateVerdict& v);
nlohmann::ordered_json to_json(const SearchSummary& s);

/// One JSON line per pass, then a {"summary": ...} line.
void write_verdict_stream(std::ostream& out, const SearchResult& result);

}  // namespace trapdyn
