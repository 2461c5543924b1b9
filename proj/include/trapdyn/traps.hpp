#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trapdyn/dynamics.hpp"
#include "trapdyn/poly.hpp"

namespace trapdyn {

enum class Claim {
  ratio_recurrence,
  additive_trap,
  multiplicative_trap,
  power_trap_fermat,
  power_trap_characterization,
  attractor,  // generic "everything reaches (0,...,0)" check for user maps
  input,      // failure record for rejected input
};

enum class Mode { exhaustive, sampled };

std::string_view claim_name(Claim c) noexcept;
std::string_view mode_name(Mode m) noexcept;

struct TrapReport {
  std::string map_name;
  std::uint64_t p = 0;
  Claim claim = Claim::input;
  std::string expected;
  bool holds = false;
  std::optional<std::uint64_t> nilpotency_index;
  // Counterexample when the claim fails; otherwise a representative
  // untrapped point when the prediction itself includes untrapped points.
  std::optional<Point> witness;
  std::uint64_t predicted_untrapped = 0;
  std::uint64_t observed_untrapped = 0;
  Mode mode = Mode::exhaustive;
  double elapsed_ms = 0;
  std::optional<std::string> error;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

/// Stable JSON form. With `reproducible`, elapsed_ms is written as 0.
nlohmann::ordered_json to_json(const TrapReport& report, bool reproducible = false);

struct VerifyOptions {
  GraphOptions graph;
  // Planes above graph.max_points are sampled instead of enumerated.
  bool allow_sampling = true;
  std::uint64_t sample_count = 1'000'000;
  std::uint64_t seed = 20110101;
  // Fermat check: stream every point of the plane even above the graph
  // budget (no graph is stored, so only time is the limit).
  bool full_plane = false;
  unsigned jobs = 0;  // per-prime concurrency in verify_all
};

/// Audits the ratio identity of a builtin map on every (x, y) with x, y != 0
/// (and x != y for the multiplicative and power traps): v/u = y/x + 1,
/// v/u = 2 y/x, v/u = (y/x)^2. Also records whether the u/v orientation
/// holds (details.printed_orientation_holds).
TrapReport verify_ratio_recurrence(BuiltinMap map, std::uint64_t p, const VerifyOptions& options = {});

/// Only cycle is the fixed point (0,0) and the nilpotency index is <= p.
TrapReport verify_additive_trap(std::uint64_t p, const VerifyOptions& options = {});

/// Everything trapped when 2 generates (Z/pZ)^*; otherwise the untrapped set
/// is exactly the points whose ratio lies outside <2>.
TrapReport verify_multiplicative_trap(std::uint64_t p, const VerifyOptions& options = {});

/// For p = 2^k + 1: k + 1 iterations send every point to (0,0). Throws
/// Error(out_of_range) when p is not a Fermat prime.
TrapReport verify_power_trap_fermat(std::uint64_t p, const VerifyOptions& options = {});

/// Trapped set equals {x = 0} u {y = 0} u {ord(y/x) a power of two}.
TrapReport verify_power_trap_characterization(std::uint64_t p, const VerifyOptions& options = {});

/// Fermat report (when p is a Fermat prime) followed by the characterization.
std::vector<TrapReport> verify_power_trap(std::uint64_t p, const VerifyOptions& options = {});

/// Generic single-attractor check: every point of F_p^n reaches the zero
/// point, which must be the only cycle.
TrapReport verify_attractor(const PolyMap& map, std::uint64_t p, const VerifyOptions& options = {});

enum class ClaimSet { trap, ratio, all };

/// Reports for one builtin map over a list of primes, in list order then a
/// fixed claim order. Non-primes become failure records.
std::vector<TrapReport> verify_map(BuiltinMap map, const std::vector<std::uint64_t>& primes,
                                   ClaimSet claims = ClaimSet::trap, const VerifyOptions& options = {});

/// Every verifier for every map, per prime: the three ratio audits, then the
/// additive, multiplicative and power-trap claims.
std::vector<TrapReport> verify_all(const std::vector<std::uint64_t>& primes, const VerifyOptions& options = {});

// Independent counting formulas (no graph code involved).

/// (p - 1) * (p - 1 - ord_p(2)) for odd p.
std::uint64_t predicted_multiplicative_untrapped(std::uint64_t p);
/// p^2 - (2p - 1) - (p - 1) * 2^{v2(p-1)}.
std::uint64_t predicted_power_untrapped(std::uint64_t p);

}  // namespace trapdyn
