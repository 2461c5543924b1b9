#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trapdyn/kernels.hpp"
#include "trapdyn/modfield.hpp"
#include "trapdyn/poly.hpp"

namespace trapdyn {

inline constexpr std::uint64_t kDefaultGraphBudget = std::uint64_t{1} << 28;
inline constexpr std::size_t kDefaultChunkSize = std::size_t{1} << 16;

/// Row-major mixed-radix index: sum coords[j] * p^(n-1-j).
std::uint64_t point_index(const Point& point);
Point point_of_index(std::uint64_t index, Residue p, std::size_t n);

/// Functional graph of a self-map of a finite set of base^n points.
///
/// Cycles are listed in order of their smallest member, each starting at that
/// member and following the successor. basin_id[i] is the position in
/// cycles() of the cycle point i eventually enters.
class FunctionalGraph {
 public:
  /// Derives cycles, tail depths and basins from a total successor array by
  /// in-degree peeling. `base` is the number of residues per coordinate.
  static FunctionalGraph from_successors(std::vector<std::uint32_t> successor, std::uint64_t base,
                                         std::size_t dim);

  std::uint64_t base() const noexcept { return base_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return successor_.size(); }

  const std::vector<std::uint32_t>& successor() const noexcept { return successor_; }
  const std::vector<std::vector<std::uint32_t>>& cycles() const noexcept { return cycles_; }
  const std::vector<std::uint32_t>& tail_depth() const noexcept { return tail_depth_; }
  const std::vector<std::uint32_t>& basin_id() const noexcept { return basin_id_; }

  bool on_cycle(std::size_t i) const noexcept { return tail_depth_[i] == 0; }
  std::uint32_t max_tail_depth() const noexcept { return max_tail_depth_; }
  /// Number of points feeding each cycle, in cycles() order.
  std::vector<std::uint64_t> basin_sizes() const;
  std::uint64_t cycle_length_of(std::size_t i) const noexcept {
    return cycles_[basin_id_[i]].size();
  }

 private:
  std::uint64_t base_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::uint32_t> successor_;
  std::vector<std::vector<std::uint32_t>> cycles_;
  std::vector<std::uint32_t> tail_depth_;
  std::vector<std::uint32_t> basin_id_;
  std::uint32_t max_tail_depth_ = 0;
};

struct GraphOptions {
  std::uint64_t max_points = kDefaultGraphBudget;
  std::size_t chunk_size = kDefaultChunkSize;
  unsigned jobs = 0;  // 0: default_jobs()
  std::optional<kernels::Backend> backend;  // unset: kernels::active_backend()
};

/// Full successor structure of `map` on F_p^n. Throws
/// Error(size_bound_exceeded) above options.max_points.
FunctionalGraph build_graph(const PolyMap& map, Residue p, const GraphOptions& options = {});

/// F applied k times.
Point iterate_k(const PolyMap& map, Point point, std::uint64_t k);

struct OrbitSummary {
  Point start;
  std::uint64_t tail_length = 0;
  std::uint64_t cycle_length = 0;
  bool hits_target = false;  // target is the all-zeros point
  std::optional<std::uint64_t> steps_to_target;
};

/// Tail and cycle length with O(1) memory (Brent's power-of-two teleporting
/// tortoise). Throws Error(budget_exceeded) when tail + cycle > max_steps.
OrbitSummary orbit(const PolyMap& map, const Point& start, std::uint64_t max_steps);

/// Least N with F^N == target everywhere, when the only cycle is the fixed
/// point `target`. Throws Error(target_not_fixed).
std::optional<std::uint64_t> nilpotency_index(const FunctionalGraph& graph, const Point& target);

/// Sorted indices of every point whose orbit reaches the fixed point target.
std::vector<std::uint32_t> trapped_set(const FunctionalGraph& graph, const Point& target);

/// Sorted multiset of cycle lengths.
std::vector<std::uint64_t> cycle_spectrum(const FunctionalGraph& graph);

struct ExtPeriodicPoint {
  std::vector<ExtElement> point;
  std::uint64_t period = 0;
};

/// Every periodic point of `map` on GF(p^k)^n with its minimal period, in
/// index order (coordinates mixed-radix by ExtElement::index()).
std::vector<ExtPeriodicPoint> periodic_points_ext(const PolyMap& map, const ExtFieldPtr& field,
                                                  std::uint64_t bound = kDefaultEnumerationBound);

/// "i -> successor[i]" one pair per line.
void write_edge_list(std::ostream& out, const FunctionalGraph& graph);
/// JSON object text: p, n, size, cycle_count, cycle_spectrum, max_tail_depth,
/// basin_sizes.
std::string graph_summary_json(const FunctionalGraph& graph, int indent = -1);

}  // namespace trapdyn
