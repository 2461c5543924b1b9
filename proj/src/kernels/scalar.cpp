#include <algorithm>

#include "kernels_impl.hpp"

namespace trapdyn::kernels::detail {

void row_successors_scalar(const RowPolys& row, Residue p, Residue y0, std::span<std::uint32_t> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::uint64_t y = y0 + j;
    std::uint64_t index = 0;
    for (std::size_t c = 0; c < row.components; ++c) {
      const auto coeffs = row.component(c);
      std::uint64_t acc = 0;
      for (std::size_t d = coeffs.size(); d-- > 0;) acc = (acc * y + coeffs[d]) % p;
      index = index * p + acc;
    }
    out[j] = static_cast<std::uint32_t>(index);
  }
}

void map_batch_scalar(const CompiledMap& map, std::span<const Residue> in, std::span<Residue> out,
                      std::size_t count) {
  const std::size_t n = map.num_vars;
  const std::uint64_t p = map.p;
  std::vector<std::uint64_t> x(n);
  std::vector<std::uint64_t> y(n);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t v = 0; v < n; ++v) x[v] = in[v * count + j];
    for (std::size_t c = 0; c < n; ++c) {
      std::uint64_t acc = 0;
      for (const auto& t : map.components[c]) {
        std::uint64_t term = t.coefficient;
        for (std::size_t v = 0; v < n; ++v) {
          for (std::uint32_t e = 0; e < t.exponents[v]; ++e) term = term * x[v] % p;
        }
        acc += term;
        if (acc >= p) acc -= p;
      }
      y[c] = acc;
    }
    for (std::size_t v = 0; v < n; ++v) out[v * count + j] = static_cast<Residue>(y[v]);
  }
}

}  // namespace trapdyn::kernels::detail
