#include "trapdyn/dynamics.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "trapdyn/error.hpp"
#include "trapdyn/parallel.hpp"

namespace trapdyn {

namespace {

std::uint64_t checked_size(std::uint64_t base, std::size_t n, std::uint64_t bound) {
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (size > bound / base) {
      throw Error(ErrorCode::size_bound_exceeded,
                  std::to_string(base) + "^" + std::to_string(n) + " points exceed the budget of " +
                      std::to_string(bound) + "; use orbit sampling instead");
    }
    size *= base;
  }
  if (size > bound) {
    throw Error(ErrorCode::size_bound_exceeded, "point count exceeds the budget of " + std::to_string(bound));
  }
  return size;
}

// Univariate restriction of every component to the row whose leading n-1
// coordinates are `prefix`.
struct RowBuilder {
  const PolyMap& map;
  Residue p;
  std::size_t last_degree = 0;

  RowBuilder(const PolyMap& m, Residue modulus) : map(m), p(modulus) {
    for (const auto& c : map.components) {
      for (const auto& t : c.terms()) last_degree = std::max<std::size_t>(last_degree, t.exponents.back());
    }
  }

  void build(std::span<const Residue> prefix, kernels::RowPolys& row) const {
    const std::size_t n = map.num_vars;
    row.components = n;
    row.stride = last_degree + 1;
    row.coeffs.assign(n * row.stride, 0);
    for (std::size_t c = 0; c < n; ++c) {
      for (const auto& t : map.components[c].terms()) {
        Residue v = reduce(t.coefficient, p);
        for (std::size_t j = 0; j + 1 < n && v != 0; ++j) {
          if (t.exponents[j] != 0) v = mod_mul(v, mod_pow(prefix[j], t.exponents[j], p), p);
        }
        Residue& slot = row.coeffs[c * row.stride + t.exponents.back()];
        slot = mod_add(slot, v, p);
      }
    }
  }
};

}  // namespace

std::uint64_t point_index(const Point& point) {
  std::uint64_t idx = 0;
  for (Residue c : point.coords) {
    if (c >= point.modulus) throw Error(ErrorCode::out_of_range, "coordinate not reduced");
    idx = idx * point.modulus + c;
  }
  return idx;
}

Point point_of_index(std::uint64_t index, Residue p, std::size_t n) {
  std::vector<Residue> coords(n);
  for (std::size_t j = n; j-- > 0;) {
    coords[j] = static_cast<Residue>(index % p);
    index /= p;
  }
  if (index != 0) throw Error(ErrorCode::out_of_range, "point index out of range");
  return Point(std::move(coords), p);
}

// ---------------------------------------------------------------------------
// FunctionalGraph
// ---------------------------------------------------------------------------

FunctionalGraph FunctionalGraph::from_successors(std::vector<std::uint32_t> successor, std::uint64_t base,
                                                 std::size_t dim) {
  FunctionalGraph g;
  g.base_ = base;
  g.dim_ = dim;
  const std::size_t size = successor.size();
  for (std::uint32_t s : successor) {
    if (s >= size) throw Error(ErrorCode::out_of_range, "successor outside the point set");
  }
  g.successor_ = std::move(successor);
  const auto& succ = g.successor_;

  // Peel points of in-degree zero; what survives is the union of cycles.
  // `order` receives peeled points so that each precedes its successor.
  std::vector<std::uint32_t> indegree(size, 0);
  for (std::uint32_t s : succ) ++indegree[s];
  std::vector<std::uint32_t> order;
  order.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (indegree[i] == 0) order.push_back(static_cast<std::uint32_t>(i));
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    const std::uint32_t s = succ[order[head]];
    if (--indegree[s] == 0) order.push_back(s);
  }

  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  g.tail_depth_.assign(size, 0);
  g.basin_id_.assign(size, kUnset);
  for (std::size_t i = 0; i < size; ++i) {
    if (indegree[i] == 0 || g.basin_id_[i] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(g.cycles_.size());
    std::vector<std::uint32_t> cycle;
    std::uint32_t cur = static_cast<std::uint32_t>(i);
    do {
      cycle.push_back(cur);
      g.basin_id_[cur] = id;
      cur = succ[cur];
    } while (cur != i);
    g.cycles_.push_back(std::move(cycle));
  }

  // Reverse peel order visits successors first.
  for (std::size_t k = order.size(); k-- > 0;) {
    const std::uint32_t i = order[k];
    g.tail_depth_[i] = g.tail_depth_[succ[i]] + 1;
    g.basin_id_[i] = g.basin_id_[succ[i]];
    g.max_tail_depth_ = std::max(g.max_tail_depth_, g.tail_depth_[i]);
  }
  return g;
}

std::vector<std::uint64_t> FunctionalGraph::basin_sizes() const {
  std::vector<std::uint64_t> sizes(cycles_.size(), 0);
  for (std::uint32_t b : basin_id_) ++sizes[b];
  return sizes;
}

FunctionalGraph build_graph(const PolyMap& map, Residue p, const GraphOptions& options) {
  require_prime(p);
  const std::size_t n = map.num_vars;
  const std::uint64_t bound = std::min<std::uint64_t>(options.max_points, std::numeric_limits<std::int32_t>::max());
  const std::uint64_t size = checked_size(p, n, bound);
  const kernels::Backend backend = options.backend.value_or(kernels::active_backend());
  const std::size_t chunk = std::max<std::size_t>(options.chunk_size, 1);
  const std::size_t chunks = (size + chunk - 1) / chunk;

  std::vector<std::uint32_t> successor(size);
  const RowBuilder rows(map, p);
  parallel_for(chunks, options.jobs, [&](std::size_t c) {
    const std::uint64_t begin = c * chunk;
    const std::uint64_t end = std::min<std::uint64_t>(size, begin + chunk);
    kernels::RowPolys row;
    std::vector<Residue> prefix(n - 1);
    std::uint64_t built_row = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t i = begin; i < end;) {
      const std::uint64_t row_index = i / p;
      const auto y0 = static_cast<Residue>(i % p);
      const std::uint64_t len = std::min<std::uint64_t>(p - y0, end - i);
      if (row_index != built_row) {
        std::uint64_t r = row_index;
        for (std::size_t j = n - 1; j-- > 0;) {
          prefix[j] = static_cast<Residue>(r % p);
          r /= p;
        }
        rows.build(prefix, row);
        built_row = row_index;
      }
      kernels::row_successors(backend, row, p, y0, std::span(successor).subspan(i, len));
      i += len;
    }
  });
  return FunctionalGraph::from_successors(std::move(successor), p, n);
}

Point iterate_k(const PolyMap& map, Point point, std::uint64_t k) {
  for (std::uint64_t i = 0; i < k; ++i) point = map_evaluate(map, point);
  return point;
}

OrbitSummary orbit(const PolyMap& map, const Point& start, std::uint64_t max_steps) {
  if (max_steps == 0) throw Error(ErrorCode::out_of_range, "max_steps must be positive");
  // Brent detects a cycle of tail mu and period lambda with the hare at most
  // 3 * (mu + lambda) steps out; 4 * max_steps is a safe horizon.
  const std::uint64_t horizon =
      max_steps > std::numeric_limits<std::uint64_t>::max() / 4 ? std::numeric_limits<std::uint64_t>::max()
                                                                : 4 * max_steps;
  auto budget_error = [&] {
    return Error(ErrorCode::budget_exceeded,
                 "orbit of " + start.to_string() + " did not close within " + std::to_string(max_steps) + " steps");
  };

  std::uint64_t power = 1;
  std::uint64_t lambda = 1;
  std::uint64_t hare_steps = 1;
  Point tortoise = start;
  Point hare = map_evaluate(map, start);
  while (tortoise != hare) {
    if (power == lambda) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
    hare = map_evaluate(map, hare);
    ++lambda;
    if (++hare_steps > horizon) throw budget_error();
  }

  std::uint64_t mu = 0;
  tortoise = start;
  hare = iterate_k(map, start, lambda);
  while (tortoise != hare) {
    tortoise = map_evaluate(map, tortoise);
    hare = map_evaluate(map, hare);
    ++mu;
  }
  if (mu + lambda > max_steps) throw budget_error();

  OrbitSummary out;
  out.start = start;
  out.tail_length = mu;
  out.cycle_length = lambda;
  Point cur = start;
  for (std::uint64_t s = 0; s < mu + lambda; ++s) {
    if (cur.is_zero()) {
      out.hits_target = true;
      out.steps_to_target = s;
      break;
    }
    cur = map_evaluate(map, cur);
  }
  return out;
}

namespace {

std::uint32_t fixed_target_index(const FunctionalGraph& graph, const Point& target) {
  if (target.dim() != graph.dim() || target.modulus != graph.base()) {
    throw Error(ErrorCode::dimension_mismatch, "target does not belong to the graph's point set");
  }
  const auto t = static_cast<std::uint32_t>(point_index(target));
  if (graph.successor()[t] != t) {
    throw Error(ErrorCode::target_not_fixed, "target " + target.to_string() + " is not a fixed point");
  }
  return t;
}

}  // namespace

std::optional<std::uint64_t> nilpotency_index(const FunctionalGraph& graph, const Point& target) {
  fixed_target_index(graph, target);
  if (graph.cycles().size() != 1) return std::nullopt;
  return graph.max_tail_depth();
}

std::vector<std::uint32_t> trapped_set(const FunctionalGraph& graph, const Point& target) {
  const std::uint32_t t = fixed_target_index(graph, target);
  const std::uint32_t basin = graph.basin_id()[t];
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (graph.basin_id()[i] == basin) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

std::vector<std::uint64_t> cycle_spectrum(const FunctionalGraph& graph) {
  std::vector<std::uint64_t> out;
  out.reserve(graph.cycles().size());
  for (const auto& c : graph.cycles()) out.push_back(c.size());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ExtPeriodicPoint> periodic_points_ext(const PolyMap& map, const ExtFieldPtr& field,
                                                  std::uint64_t bound) {
  const std::size_t n = map.num_vars;
  const std::uint64_t q = field->size();
  const std::uint64_t size = checked_size(q, n, std::min<std::uint64_t>(bound, std::numeric_limits<std::int32_t>::max()));

  auto decode = [&](std::uint64_t index) {
    std::vector<ExtElement> pt(n);
    for (std::size_t j = n; j-- > 0;) {
      pt[j] = field->element(index % q);
      index /= q;
    }
    return pt;
  };

  std::vector<std::uint32_t> successor(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    const auto pt = decode(i);
    std::uint64_t idx = 0;
    for (const auto& comp : map.components) idx = idx * q + ext_eval_poly(comp, pt).index();
    successor[i] = static_cast<std::uint32_t>(idx);
  }
  const auto graph = FunctionalGraph::from_successors(std::move(successor), q, n);

  std::vector<ExtPeriodicPoint> out;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (graph.on_cycle(i)) out.push_back({decode(i), graph.cycle_length_of(i)});
  }
  return out;
}

void write_edge_list(std::ostream& out, const FunctionalGraph& graph) {
  for (std::size_t i = 0; i < graph.size(); ++i) out << i << " -> " << graph.successor()[i] << '\n';
}

std::string graph_summary_json(const FunctionalGraph& graph, int indent) {
  nlohmann::ordered_json j;
  j["p"] = graph.base();
  j["n"] = graph.dim();
  j["size"] = graph.size();
  j["cycle_count"] = graph.cycles().size();
  j["cycle_spectrum"] = cycle_spectrum(graph);
  j["max_tail_depth"] = graph.max_tail_depth();
  j["basin_sizes"] = graph.basin_sizes();
  return j.dump(indent);
}

}  // namespace trapdyn
