#include "trapdyn/traps.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <random>

#include "trapdyn/error.hpp"
#include "trapdyn/kernels.hpp"
#include "trapdyn/modfield.hpp"
#include "trapdyn/parallel.hpp"

namespace trapdyn {

std::string_view claim_name(Claim c) noexcept {
  switch (c) {
    case Claim::ratio_recurrence: return "ratio_recurrence";
    case Claim::additive_trap: return "additive_trap";
    case Claim::multiplicative_trap: return "multiplicative_trap";
    case Claim::power_trap_fermat: return "power_trap_fermat";
    case Claim::power_trap_characterization: return "power_trap_characterization";
    case Claim::attractor: return "attractor";
    case Claim::input: return "input";
  }
  return "input";
}

std::string_view mode_name(Mode m) noexcept { return m == Mode::sampled ? "sampled" : "exhaustive"; }

nlohmann::ordered_json to_json(const TrapReport& r, bool reproducible) {
  nlohmann::ordered_json j;
  j["map"] = r.map_name;
  j["p"] = r.p;
  j["claim"] = claim_name(r.claim);
  j["holds"] = r.holds;
  j["nilpotency_index"] = r.nilpotency_index ? nlohmann::ordered_json(*r.nilpotency_index) : nullptr;
  j["witness"] = r.witness ? nlohmann::ordered_json(r.witness->coords) : nullptr;
  j["predicted_untrapped"] = r.predicted_untrapped;
  j["observed_untrapped"] = r.observed_untrapped;
  j["mode"] = mode_name(r.mode);
  j["elapsed_ms"] = reproducible ? 0.0 : r.elapsed_ms;
  j["expected"] = r.expected;
  if (r.error) j["error"] = *r.error;
  j["details"] = r.details;
  return j;
}

std::uint64_t predicted_multiplicative_untrapped(std::uint64_t p) {
  require_prime(p);
  if (p == 2) return 0;
  const auto pr = static_cast<Residue>(p);
  return (p - 1) * (p - 1 - mult_order(2, pr));
}

std::uint64_t predicted_power_untrapped(std::uint64_t p) {
  require_prime(p);
  // The 2-Sylow subgroup of the cyclic group (Z/pZ)^* has 2^{v2(p-1)} elements.
  const std::uint64_t two_part = p == 2 ? 1 : std::uint64_t{1} << std::countr_zero(p - 1);
  return p * p - (2 * p - 1) - (p - 1) * two_part;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Residue checked_residue_modulus(std::uint64_t p) {
  require_prime(p);
  if (p >= (std::uint64_t{1} << 31)) throw Error(ErrorCode::out_of_range, "prime too large for residue arithmetic");
  return static_cast<Residue>(p);
}

bool plane_fits(std::uint64_t p, const VerifyOptions& o) {
  return p <= o.graph.max_points / p;
}

void require_sampling(const VerifyOptions& o, std::uint64_t p) {
  if (!o.allow_sampling) {
    throw Error(ErrorCode::size_bound_exceeded,
                "plane of " + std::to_string(p) + "^2 points exceeds the graph budget and sampling is disabled");
  }
}

// Inverse table for small p; direct extended Euclid otherwise.
class Inverses {
 public:
  explicit Inverses(Residue p) : p_(p) {
    if (p <= (Residue{1} << 22)) {
      table_.assign(p, 0);
      if (p > 1) table_[1] = 1;
      for (Residue i = 2; i < p; ++i) {
        table_[i] = mod_sub(0, mod_mul(p / i, table_[p % i], p), p);
      }
    }
  }
  Residue operator()(Residue a) const { return table_.empty() ? mod_inv(a, p_) : table_[a]; }

 private:
  Residue p_;
  std::vector<Residue> table_;
};

// Points of F_p^2 handed out in blocks of structure-of-arrays coordinates:
// exhaustively (block b = the row x = b) or as seeded uniform samples.
class PlaneSource {
 public:
  static constexpr std::size_t kSampleBlock = std::size_t{1} << 16;

  PlaneSource(Residue p, bool sampled, std::uint64_t samples, std::uint64_t seed)
      : p_(p), sampled_(sampled), samples_(samples), seed_(seed) {}

  bool sampled() const { return sampled_; }
  std::uint64_t blocks() const { return sampled_ ? (samples_ + kSampleBlock - 1) / kSampleBlock : p_; }
  std::size_t block_len(std::uint64_t b) const {
    if (!sampled_) return p_;
    return static_cast<std::size_t>(std::min<std::uint64_t>(kSampleBlock, samples_ - b * kSampleBlock));
  }
  std::uint64_t total() const { return sampled_ ? samples_ : std::uint64_t{p_} * p_; }

  // coords has 2 * block_len(b) entries: x values then y values.
  void fill(std::uint64_t b, std::vector<Residue>& coords) const {
    const std::size_t len = block_len(b);
    coords.resize(2 * len);
    if (!sampled_) {
      std::fill_n(coords.begin(), len, static_cast<Residue>(b));
      for (std::size_t j = 0; j < len; ++j) coords[len + j] = static_cast<Residue>(j);
      return;
    }
    std::seed_seq seq{seed_, b};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<Residue> dist(0, p_ - 1);
    for (std::size_t j = 0; j < len; ++j) {
      coords[j] = dist(rng);
      coords[len + j] = dist(rng);
    }
  }

 private:
  Residue p_;
  bool sampled_;
  std::uint64_t samples_;
  std::uint64_t seed_;
};

// Runs `fn(block, x, y, len, result)` over every block and returns the
// per-block results in block order.
template <class Result, class Fn>
std::vector<Result> for_each_block(const PlaneSource& src, unsigned jobs, Fn&& fn) {
  std::vector<Result> results(src.blocks());
  parallel_for(results.size(), jobs, [&](std::size_t b) {
    std::vector<Residue> coords;
    src.fill(b, coords);
    const std::size_t len = src.block_len(b);
    fn(b, std::span<Residue>(coords), len, results[b]);
  });
  return results;
}

// Result of iterating sampled or enumerated points a fixed number of steps
// and comparing "reached zero" with a predicted trapped predicate.
struct IterationTally {
  std::uint64_t checked = 0;
  std::uint64_t predicted_untrapped = 0;
  std::uint64_t observed_untrapped = 0;
  std::uint64_t mismatches = 0;
  std::optional<Point> witness;  // first mismatch, else first untrapped
  bool witness_is_mismatch = false;
};

template <class Predicate>
IterationTally iterate_and_compare(const PolyMap& map, Residue p, const PlaneSource& src, std::uint64_t steps,
                                   unsigned jobs, Predicate&& trapped_predicted) {
  const kernels::CompiledMap compiled = kernels::compile_map(map, p);
  const kernels::Backend backend = kernels::active_backend();
  auto blocks = for_each_block<IterationTally>(
      src, jobs, [&](std::uint64_t, std::span<Residue> coords, std::size_t len, IterationTally& t) {
        const std::vector<Residue> start(coords.begin(), coords.end());
        kernels::iterate_batch(backend, compiled, coords, len, steps);
        for (std::size_t j = 0; j < len; ++j) {
          const Residue x = start[j], y = start[len + j];
          const bool predicted = trapped_predicted(x, y);
          const bool observed = coords[j] == 0 && coords[len + j] == 0;
          ++t.checked;
          if (!predicted) ++t.predicted_untrapped;
          if (!observed) ++t.observed_untrapped;
          if (predicted != observed) {
            ++t.mismatches;
            if (!t.witness_is_mismatch) {
              t.witness = Point({x, y}, p);
              t.witness_is_mismatch = true;
            }
          } else if (!observed && !t.witness) {
            t.witness = Point({x, y}, p);
          }
        }
      });
  IterationTally total;
  for (auto& b : blocks) {
    total.checked += b.checked;
    total.predicted_untrapped += b.predicted_untrapped;
    total.observed_untrapped += b.observed_untrapped;
    total.mismatches += b.mismatches;
    if (b.witness_is_mismatch && !total.witness_is_mismatch) {
      total.witness = b.witness;
      total.witness_is_mismatch = true;
    } else if (b.witness && !total.witness) {
      total.witness = b.witness;
    }
  }
  return total;
}

void apply_sampled(TrapReport& r, const IterationTally& t, std::uint64_t steps, std::uint64_t seed) {
  r.mode = Mode::sampled;
  r.holds = t.mismatches == 0;
  r.predicted_untrapped = t.predicted_untrapped;
  r.observed_untrapped = t.observed_untrapped;
  r.witness = t.witness;
  r.details["points_checked"] = t.checked;
  r.details["iterations"] = steps;
  r.details["seed"] = seed;
}

Point zero_point(Residue p) { return Point({0, 0}, p); }

std::vector<char> trapped_mask(const FunctionalGraph& g, Residue p) {
  std::vector<char> mask(g.size(), 0);
  for (std::uint32_t i : trapped_set(g, zero_point(p))) mask[i] = 1;
  return mask;
}

std::optional<Point> first_untrapped(const std::vector<char>& mask, Residue p) {
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) return point_of_index(i, p, 2);
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ratio recurrences
// ---------------------------------------------------------------------------

TrapReport verify_ratio_recurrence(BuiltinMap which, std::uint64_t p_in, const VerifyOptions& options) {
  const auto start = Clock::now();
  const Residue p = checked_residue_modulus(p_in);
  TrapReport r;
  r.map_name = std::string(builtin_name(which));
  r.p = p;
  r.claim = Claim::ratio_recurrence;
  const bool needs_distinct = which != BuiltinMap::additive_trap;
  std::string canonical, printed;
  switch (which) {
    case BuiltinMap::additive_trap:
      canonical = printed = "v/u = y/x + 1";
      break;
    case BuiltinMap::multiplicative_trap:
      canonical = "v/u = 2*(y/x)";
      printed = "u/v = 2*(y/x)";
      break;
    case BuiltinMap::power_trap:
      canonical = "v/u = (y/x)^2";
      printed = "u/v = (y/x)^2";
      break;
  }
  r.expected = canonical + " for all x, y != 0" + (needs_distinct ? ", x != y" : "");

  const bool sampled = !plane_fits(p, options);
  if (sampled) require_sampling(options, p);
  const PlaneSource src(p, sampled, options.sample_count, options.seed);
  const PolyMap map = builtin(which);
  const kernels::CompiledMap compiled = kernels::compile_map(map, p);
  const kernels::Backend backend = kernels::active_backend();
  const Inverses inv(p);

  auto transported = [&](Residue ratio) {
    switch (which) {
      case BuiltinMap::additive_trap: return mod_add(ratio, 1, p);
      case BuiltinMap::multiplicative_trap: return mod_mul(2, ratio, p);
      case BuiltinMap::power_trap: return mod_mul(ratio, ratio, p);
    }
    return ratio;
  };

  struct Tally {
    std::uint64_t checked = 0, skipped = 0, canonical_fail = 0, printed_fail = 0;
    std::optional<Point> canonical_witness, printed_witness;
  };
  const auto blocks = for_each_block<Tally>(
      src, options.graph.jobs, [&](std::uint64_t, std::span<Residue> coords, std::size_t len, Tally& t) {
        std::vector<Residue> image(coords.size());
        kernels::map_batch(backend, compiled, coords, image, len);
        for (std::size_t j = 0; j < len; ++j) {
          const Residue x = coords[j], y = coords[len + j];
          if (x == 0 || y == 0 || (needs_distinct && x == y)) continue;
          const Residue u = image[j], v = image[len + j];
          if (u == 0) {
            ++t.skipped;
            continue;
          }
          ++t.checked;
          const Residue want = transported(mod_mul(y, inv(x), p));
          if (mod_mul(v, inv(u), p) != want) {
            ++t.canonical_fail;
            if (!t.canonical_witness) t.canonical_witness = Point({x, y}, p);
          }
          const bool printed_ok = which == BuiltinMap::additive_trap
                                      ? mod_mul(v, inv(u), p) == want
                                      : v != 0 && mod_mul(u, inv(v), p) == want;
          if (!printed_ok) {
            ++t.printed_fail;
            if (!t.printed_witness) t.printed_witness = Point({x, y}, p);
          }
        }
      });
  Tally total;
  for (const auto& b : blocks) {
    total.checked += b.checked;
    total.skipped += b.skipped;
    total.canonical_fail += b.canonical_fail;
    total.printed_fail += b.printed_fail;
    if (!total.canonical_witness) total.canonical_witness = b.canonical_witness;
    if (!total.printed_witness) total.printed_witness = b.printed_witness;
  }

  r.mode = sampled ? Mode::sampled : Mode::exhaustive;
  r.holds = total.canonical_fail == 0;
  r.witness = total.canonical_witness;
  r.details["canonical_form"] = canonical;
  r.details["printed_form"] = printed;
  r.details["printed_orientation_holds"] = total.printed_fail == 0;
  r.details["printed_orientation_counterexample"] =
      total.printed_witness ? nlohmann::ordered_json(total.printed_witness->coords) : nullptr;
  r.details["points_checked"] = total.checked;
  r.details["points_with_zero_u"] = total.skipped;
  if (sampled) r.details["seed"] = options.seed;
  r.elapsed_ms = ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Additive trap
// ---------------------------------------------------------------------------

TrapReport verify_additive_trap(std::uint64_t p_in, const VerifyOptions& options) {
  const auto start = Clock::now();
  const Residue p = checked_residue_modulus(p_in);
  TrapReport r;
  r.map_name = "additive_trap";
  r.p = p;
  r.claim = Claim::additive_trap;
  r.expected = "the p-th iterate sends every point to (0,0)";
  const PolyMap map = builtin(BuiltinMap::additive_trap);

  if (!plane_fits(p, options)) {
    require_sampling(options, p);
    const PlaneSource src(p, true, options.sample_count, options.seed);
    const auto tally = iterate_and_compare(map, p, src, p, options.graph.jobs, [](Residue, Residue) { return true; });
    apply_sampled(r, tally, p, options.seed);
    r.elapsed_ms = ms_since(start);
    return r;
  }

  const FunctionalGraph g = build_graph(map, p, options.graph);
  const auto mask = trapped_mask(g, p);
  r.nilpotency_index = nilpotency_index(g, zero_point(p));
  r.observed_untrapped = static_cast<std::uint64_t>(std::count(mask.begin(), mask.end(), 0));
  r.holds = r.nilpotency_index && *r.nilpotency_index <= p;
  if (!r.holds) {
    r.witness = first_untrapped(mask, p);
    if (!r.witness) {
      // Everything trapped but slower than p steps: report a deepest point.
      const auto& depth = g.tail_depth();
      const auto it = std::max_element(depth.begin(), depth.end());
      r.witness = point_of_index(static_cast<std::uint64_t>(it - depth.begin()), p, 2);
    }
  }
  r.details["nilpotency_equals_p"] = r.nilpotency_index && *r.nilpotency_index == p;
  r.details["cycle_spectrum"] = cycle_spectrum(g);
  r.elapsed_ms = ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Multiplicative trap
// ---------------------------------------------------------------------------

TrapReport verify_multiplicative_trap(std::uint64_t p_in, const VerifyOptions& options) {
  const auto start = Clock::now();
  const Residue p = checked_residue_modulus(p_in);
  TrapReport r;
  r.map_name = "multiplicative_trap";
  r.p = p;
  r.claim = Claim::multiplicative_trap;
  const PolyMap map = builtin(BuiltinMap::multiplicative_trap);

  if (p == 2) {
    // v = 2xy^2(x-y) vanishes identically; u is then killed on the next step.
    r.expected = "degenerate: coefficient 2 vanishes mod 2, every point reaches (0,0)";
    const FunctionalGraph g = build_graph(map, p, options.graph);
    const auto mask = trapped_mask(g, p);
    r.observed_untrapped = static_cast<std::uint64_t>(std::count(mask.begin(), mask.end(), 0));
    r.nilpotency_index = nilpotency_index(g, zero_point(p));
    r.holds = r.observed_untrapped == 0;
    r.witness = first_untrapped(mask, p);
    r.details["degenerate"] = true;
    r.elapsed_ms = ms_since(start);
    return r;
  }

  const std::uint64_t ord = mult_order(2, p);
  const bool generator = ord == p - 1;
  r.expected = generator ? "2 generates (Z/pZ)^*: every point reaches (0,0)"
                         : "2 is not a generator: untrapped exactly where y/x lies outside <2>";
  r.predicted_untrapped = predicted_multiplicative_untrapped(p);
  r.details["two_is_generator"] = generator;
  r.details["order_of_two"] = ord;

  if (!plane_fits(p, options)) {
    require_sampling(options, p);
    const PlaneSource src(p, true, options.sample_count, options.seed);
    // A trapped ratio reaches 1 within ord - 1 doublings, then one more step.
    const auto tally = iterate_and_compare(map, p, src, ord + 1, options.graph.jobs, [&](Residue x, Residue y) {
      return x == 0 || y == 0 || mod_pow(mod_mul(y, mod_inv(x, p), p), ord, p) == 1;
    });
    apply_sampled(r, tally, ord + 1, options.seed);
    r.elapsed_ms = ms_since(start);
    return r;
  }

  const FunctionalGraph g = build_graph(map, p, options.graph);
  const auto mask = trapped_mask(g, p);
  r.observed_untrapped = static_cast<std::uint64_t>(std::count(mask.begin(), mask.end(), 0));
  r.nilpotency_index = nilpotency_index(g, zero_point(p));
  r.witness = first_untrapped(mask, p);

  const Inverses inv(p);
  std::vector<char> observed_classes(p, 0);
  bool axis_untrapped = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) continue;
    const auto x = static_cast<Residue>(i / p), y = static_cast<Residue>(i % p);
    if (x == 0 || y == 0) {
      axis_untrapped = true;
      continue;
    }
    observed_classes[mod_mul(y, inv(x), p)] = 1;
  }
  std::vector<char> expected_classes(p, 1);
  expected_classes[0] = 0;
  for (Residue s : cyclic_subgroup(2, p)) expected_classes[s] = 0;

  std::vector<Residue> untrapped_list;
  for (Residue c = 1; c < p; ++c) {
    if (observed_classes[c]) untrapped_list.push_back(c);
  }
  r.details["untrapped_ratio_classes"] = untrapped_list;
  r.details["ratio_classes_match"] = observed_classes == expected_classes;
  r.holds = !axis_untrapped && observed_classes == expected_classes &&
            r.observed_untrapped == r.predicted_untrapped && (generator == (r.observed_untrapped == 0));
  r.elapsed_ms = ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Power trap
// ---------------------------------------------------------------------------

TrapReport verify_power_trap_fermat(std::uint64_t p_in, const VerifyOptions& options) {
  const auto start = Clock::now();
  const Residue p = checked_residue_modulus(p_in);
  const auto k = fermat_exponent(p);
  if (!k) throw Error(ErrorCode::out_of_range, std::to_string(p) + " is not a Fermat prime");
  TrapReport r;
  r.map_name = "power_trap";
  r.p = p;
  r.claim = Claim::power_trap_fermat;
  r.expected = std::to_string(*k + 1) + " iterations send every point to (0,0) (p = 2^" + std::to_string(*k) + " + 1)";

  const bool sampled = !plane_fits(p, options) && !options.full_plane;
  if (sampled) require_sampling(options, p);
  const PlaneSource src(p, sampled, options.sample_count, options.seed);
  const PolyMap map = builtin(BuiltinMap::power_trap);
  const kernels::CompiledMap compiled = kernels::compile_map(map, p);
  const kernels::Backend backend = kernels::active_backend();

  struct Tally {
    std::uint64_t checked = 0, alive_after_k = 0, alive_after_k1 = 0;
    std::optional<Point> witness;
  };
  const auto blocks = for_each_block<Tally>(
      src, options.graph.jobs, [&](std::uint64_t, std::span<Residue> coords, std::size_t len, Tally& t) {
        const std::vector<Residue> start_coords(coords.begin(), coords.end());
        kernels::iterate_batch(backend, compiled, coords, len, *k);
        for (std::size_t j = 0; j < len; ++j) t.alive_after_k += (coords[j] | coords[len + j]) != 0;
        kernels::iterate_batch(backend, compiled, coords, len, 1);
        for (std::size_t j = 0; j < len; ++j) {
          if ((coords[j] | coords[len + j]) != 0) {
            ++t.alive_after_k1;
            if (!t.witness) t.witness = Point({start_coords[j], start_coords[len + j]}, p);
          }
        }
        t.checked += len;
      });
  Tally total;
  for (const auto& b : blocks) {
    total.checked += b.checked;
    total.alive_after_k += b.alive_after_k;
    total.alive_after_k1 += b.alive_after_k1;
    if (!total.witness) total.witness = b.witness;
  }
  r.mode = sampled ? Mode::sampled : Mode::exhaustive;
  r.holds = total.alive_after_k1 == 0;
  r.observed_untrapped = total.alive_after_k1;
  r.witness = total.witness;
  // Exhaustively, k + 1 is the exact index when k iterations leave survivors.
  if (!sampled && r.holds && total.alive_after_k > 0) r.nilpotency_index = *k + 1;
  r.details["k"] = *k;
  r.details["iterations"] = *k + 1;
  r.details["k_iterations_suffice"] = total.alive_after_k == 0;
  r.details["survivors_after_k"] = total.alive_after_k;
  r.details["points_checked"] = total.checked;
  if (sampled) r.details["seed"] = options.seed;
  r.elapsed_ms = ms_since(start);
  return r;
}

TrapReport verify_power_trap_characterization(std::uint64_t p_in, const VerifyOptions& options) {
  const auto start = Clock::now();
  const Residue p = checked_residue_modulus(p_in);
  TrapReport r;
  r.map_name = "power_trap";
  r.p = p;
  r.claim = Claim::power_trap_characterization;
  r.expected = "trapped exactly when x = 0, y = 0, or ord(y/x) is a power of 2";
  r.predicted_untrapped = predicted_power_untrapped(p);
  const PolyMap map = builtin(BuiltinMap::power_trap);
  const unsigned v2 = p == 2 ? 0 : static_cast<unsigned>(std::countr_zero(std::uint64_t{p} - 1));

  if (!plane_fits(p, options)) {
    require_sampling(options, p);
    const PlaneSource src(p, true, options.sample_count, options.seed);
    const std::uint64_t two_part = std::uint64_t{1} << v2;
    // v2 squarings bring any 2-primary ratio to 1; one more step kills it.
    const auto tally = iterate_and_compare(map, p, src, v2 + 1, options.graph.jobs, [&](Residue x, Residue y) {
      return x == 0 || y == 0 || mod_pow(mod_mul(y, mod_inv(x, p), p), two_part, p) == 1;
    });
    apply_sampled(r, tally, v2 + 1, options.seed);
    r.elapsed_ms = ms_since(start);
    return r;
  }

  const FunctionalGraph g = build_graph(map, p, options.graph);
  const auto mask = trapped_mask(g, p);
  r.observed_untrapped = static_cast<std::uint64_t>(std::count(mask.begin(), mask.end(), 0));
  r.nilpotency_index = nilpotency_index(g, zero_point(p));

  std::vector<char> two_primary_ratio(p, 0);
  for (Residue c = 1; c < p; ++c) two_primary_ratio[c] = is_two_primary(mult_order(c, p));
  const Inverses inv(p);
  std::uint64_t mismatches = 0;
  std::optional<Point> mismatch_witness;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto x = static_cast<Residue>(i / p), y = static_cast<Residue>(i % p);
    const bool predicted = x == 0 || y == 0 || two_primary_ratio[mod_mul(y, inv(x), p)];
    if (predicted != static_cast<bool>(mask[i])) {
      ++mismatches;
      if (!mismatch_witness) mismatch_witness = Point({x, y}, p);
    }
  }
  r.holds = mismatches == 0 && r.predicted_untrapped == r.observed_untrapped;
  r.witness = mismatch_witness ? mismatch_witness : first_untrapped(mask, p);
  r.details["pointwise_mismatches"] = mismatches;
  r.details["two_primary_ratio_count"] = std::count(two_primary_ratio.begin(), two_primary_ratio.end(), 1);
  r.details["fermat_prime"] = fermat_exponent(p).has_value();
  r.elapsed_ms = ms_since(start);
  return r;
}

std::vector<TrapReport> verify_power_trap(std::uint64_t p, const VerifyOptions& options) {
  std::vector<TrapReport> out;
  require_prime(p);
  if (fermat_exponent(p)) out.push_back(verify_power_trap_fermat(p, options));
  out.push_back(verify_power_trap_characterization(p, options));
  return out;
}

TrapReport verify_attractor(const PolyMap& map, std::uint64_t p_in, const VerifyOptions& options) {
  const auto start = Clock::now();
  const Residue p = checked_residue_modulus(p_in);
  TrapReport r;
  r.map_name = map.name.empty() ? "custom" : map.name;
  r.p = p;
  r.claim = Claim::attractor;
  r.expected = "every point eventually reaches the zero point";
  const FunctionalGraph g = build_graph(map, p, options.graph);
  const Point zero(std::vector<Residue>(map.num_vars, 0), p);
  if (g.successor()[point_index(zero)] != point_index(zero)) {
    r.holds = false;
    r.witness = zero;
    r.observed_untrapped = g.size();
    r.details["zero_is_fixed"] = false;
  } else {
    const auto trapped = trapped_set(g, zero);
    r.observed_untrapped = g.size() - trapped.size();
    r.nilpotency_index = nilpotency_index(g, zero);
    r.holds = r.observed_untrapped == 0;
    if (!r.holds) {
      std::vector<char> mask(g.size(), 0);
      for (auto i : trapped) mask[i] = 1;
      const auto it = std::find(mask.begin(), mask.end(), 0);
      r.witness = point_of_index(static_cast<std::uint64_t>(it - mask.begin()), p, map.num_vars);
    }
    r.details["zero_is_fixed"] = true;
  }
  r.details["cycle_spectrum"] = cycle_spectrum(g);
  r.elapsed_ms = ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

namespace {

TrapReport failure_record(std::string map_name, std::uint64_t p, const std::string& message) {
  TrapReport r;
  r.map_name = std::move(map_name);
  r.p = p;
  r.claim = Claim::input;
  r.holds = false;
  r.expected = "prime modulus";
  r.error = message;
  return r;
}

std::vector<TrapReport> reports_for(BuiltinMap map, std::uint64_t p, ClaimSet claims, const VerifyOptions& o) {
  std::vector<TrapReport> out;
  if (claims != ClaimSet::trap) out.push_back(verify_ratio_recurrence(map, p, o));
  if (claims != ClaimSet::ratio) {
    switch (map) {
      case BuiltinMap::additive_trap: out.push_back(verify_additive_trap(p, o)); break;
      case BuiltinMap::multiplicative_trap: out.push_back(verify_multiplicative_trap(p, o)); break;
      case BuiltinMap::power_trap:
        for (auto& r : verify_power_trap(p, o)) out.push_back(std::move(r));
        break;
    }
  }
  return out;
}

template <class PerPrime>
std::vector<TrapReport> run_suite(const std::vector<std::uint64_t>& primes, const VerifyOptions& options,
                                  std::string_view label, PerPrime&& per_prime) {
  std::vector<std::vector<TrapReport>> slots(primes.size());
  VerifyOptions inner = options;
  // Primes run concurrently; keep each verifier single-threaded.
  if (primes.size() > 1 && resolve_jobs(options.jobs) > 1) inner.graph.jobs = 1;
  parallel_for(primes.size(), options.jobs, [&](std::size_t i) {
    try {
      require_prime(primes[i]);
      slots[i] = per_prime(primes[i], inner);
    } catch (const Error& e) {
      slots[i] = {failure_record(std::string(label), primes[i], e.what())};
    }
  });
  std::vector<TrapReport> out;
  for (auto& s : slots) {
    for (auto& r : s) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<TrapReport> verify_map(BuiltinMap map, const std::vector<std::uint64_t>& primes, ClaimSet claims,
                                   const VerifyOptions& options) {
  return run_suite(primes, options, builtin_name(map), [&](std::uint64_t p, const VerifyOptions& o) {
    return reports_for(map, p, claims, o);
  });
}

std::vector<TrapReport> verify_all(const std::vector<std::uint64_t>& primes, const VerifyOptions& options) {
  return run_suite(primes, options, "all", [&](std::uint64_t p, const VerifyOptions& o) {
    std::vector<TrapReport> out;
    for (auto m : {BuiltinMap::additive_trap, BuiltinMap::multiplicative_trap, BuiltinMap::power_trap}) {
      out.push_back(verify_ratio_recurrence(m, p, o));
    }
    for (auto m : {BuiltinMap::additive_trap, BuiltinMap::multiplicative_trap, BuiltinMap::power_trap}) {
      for (auto& r : reports_for(m, p, ClaimSet::trap, o)) out.push_back(std::move(r));
    }
    return out;
  });
}

}  // namespace trapdyn
