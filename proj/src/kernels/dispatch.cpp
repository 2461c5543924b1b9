#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "trapdyn/error.hpp"
#include "trapdyn/modfield.hpp"

namespace trapdyn::kernels {

namespace detail {
#if defined(TRAPDYN_HAVE_AVX2)
bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}
#endif
}  // namespace detail

namespace {

// -1: no override, otherwise the Backend value.
std::atomic<int> g_override{-1};

Backend best_available() noexcept {
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

Backend resolve(Backend requested, Residue p) noexcept {
  if (requested == Backend::avx2 && (!backend_available(Backend::avx2) || p >= kSimdModulusLimit)) {
    return Backend::scalar;
  }
  return requested;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "scalar";
}

std::optional<Backend> backend_from_name(std::string_view name) noexcept {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  return std::nullopt;
}

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2:
#if defined(TRAPDYN_HAVE_AVX2)
      return detail::cpu_has_avx2();
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() noexcept {
  if (const int o = g_override.load(std::memory_order_relaxed); o >= 0) {
    return resolve(static_cast<Backend>(o), 0);
  }
  static const Backend from_env = [] {
    if (const char* env = std::getenv("TRAPDYN_KERNEL")) {
      if (auto b = backend_from_name(env)) return resolve(*b, 0);
    }
    return best_available();
  }();
  return from_env;
}

void set_backend_override(std::optional<Backend> b) noexcept {
  g_override.store(b ? static_cast<int>(*b) : -1, std::memory_order_relaxed);
}

void row_successors(Backend b, const RowPolys& row, Residue p, Residue y0, std::span<std::uint32_t> out) {
  switch (resolve(b, p)) {
#if defined(TRAPDYN_HAVE_AVX2)
    case Backend::avx2:
      detail::row_successors_avx2(row, p, y0, out);
      return;
#endif
    default:
      detail::row_successors_scalar(row, p, y0, out);
  }
}

CompiledMap compile_map(const PolyMap& map, Residue p) {
  CompiledMap out;
  out.num_vars = map.num_vars;
  out.p = p;
  out.max_exponent.assign(map.num_vars, 0);
  for (const auto& comp : map.components) {
    std::vector<CompiledMap::Term> terms;
    for (const auto& t : comp.terms()) {
      const Residue c = reduce(t.coefficient, p);
      if (c == 0) continue;
      for (std::size_t v = 0; v < map.num_vars; ++v) {
        out.max_exponent[v] = std::max(out.max_exponent[v], t.exponents[v]);
      }
      terms.push_back({c, t.exponents});
    }
    out.components.push_back(std::move(terms));
  }
  return out;
}

void map_batch(Backend b, const CompiledMap& map, std::span<const Residue> in, std::span<Residue> out,
               std::size_t count) {
  if (in.size() < map.num_vars * count || out.size() < map.num_vars * count) {
    throw Error(ErrorCode::dimension_mismatch, "batch buffers smaller than num_vars * count");
  }
  switch (resolve(b, map.p)) {
#if defined(TRAPDYN_HAVE_AVX2)
    case Backend::avx2:
      detail::map_batch_avx2(map, in, out, count);
      return;
#endif
    default:
      detail::map_batch_scalar(map, in, out, count);
  }
}

void iterate_batch(Backend b, const CompiledMap& map, std::span<Residue> points, std::size_t count,
                   std::uint64_t steps) {
  if (points.size() < map.num_vars * count) {
    throw Error(ErrorCode::dimension_mismatch, "batch buffer smaller than num_vars * count");
  }
  switch (resolve(b, map.p)) {
#if defined(TRAPDYN_HAVE_AVX2)
    case Backend::avx2:
      detail::iterate_batch_avx2(map, points, count, steps);
      return;
#endif
    default:
      for (std::uint64_t s = 0; s < steps; ++s) detail::map_batch_scalar(map, points, points, count);
  }
}

}  // namespace trapdyn::kernels
