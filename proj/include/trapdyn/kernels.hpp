#pragma once

// Inner-loop kernels for exhaustive enumeration. Every kernel has a scalar
// reference implementation (64-bit integer remainder) and, on x86-64, an AVX2
// variant (4 lanes of exact double arithmetic with floor-quotient reduction).
// The variant is chosen at runtime; both must produce identical output.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "trapdyn/poly.hpp"

namespace trapdyn::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b) noexcept;
std::optional<Backend> backend_from_name(std::string_view name) noexcept;

/// Compiled in and supported by the running CPU.
bool backend_available(Backend b) noexcept;

/// Best available backend, unless overridden by set_backend_override() or the
/// TRAPDYN_KERNEL environment variable ("scalar" / "avx2").
Backend active_backend() noexcept;
void set_backend_override(std::optional<Backend> b) noexcept;

/// Largest modulus the SIMD variants accept (products must stay below 2^53).
inline constexpr Residue kSimdModulusLimit = Residue{1} << 26;

/// Component polynomials restricted to a row: all coordinates but the last are
/// fixed, leaving one univariate polynomial per component in the last
/// coordinate. Coefficients are stored component-major, low degree first.
struct RowPolys {
  std::size_t components = 0;
  std::size_t stride = 0;  // degree + 1
  std::vector<Residue> coeffs;

  std::span<const Residue> component(std::size_t c) const {
    return {coeffs.data() + c * stride, stride};
  }
};

/// out[j] = mixed-radix index of (f_0(y), ..., f_{n-1}(y)) for y = y0 + j,
/// first component most significant. Requires y0 + out.size() <= p and
/// p^components < 2^31.
void row_successors(Backend b, const RowPolys& row, Residue p, Residue y0,
                    std::span<std::uint32_t> out);

/// A map with coefficients reduced mod p, flattened for batch evaluation.
struct CompiledMap {
  struct Term {
    Residue coefficient;
    std::vector<std::uint32_t> exponents;
  };

  std::size_t num_vars = 0;
  Residue p = 0;
  std::vector<std::vector<Term>> components;
  std::vector<std::uint32_t> max_exponent;  // per variable
};

CompiledMap compile_map(const PolyMap& map, Residue p);

/// Applies the map to `count` points in structure-of-arrays layout:
/// in[v * count + j] is coordinate v of point j. `out` has the same layout and
/// may alias `in`.
void map_batch(Backend b, const CompiledMap& map, std::span<const Residue> in,
               std::span<Residue> out, std::size_t count);

/// Applies the map `steps` times in place.
void iterate_batch(Backend b, const CompiledMap& map, std::span<Residue> points, std::size_t count,
                   std::uint64_t steps);

}  // namespace trapdyn::kernels
