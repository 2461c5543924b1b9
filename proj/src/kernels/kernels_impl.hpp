#pragma once

#include "trapdyn/kernels.hpp"

namespace trapdyn::kernels::detail {

void row_successors_scalar(const RowPolys& row, Residue p, Residue y0, std::span<std::uint32_t> out);
void map_batch_scalar(const CompiledMap& map, std::span<const Residue> in, std::span<Residue> out,
                      std::size_t count);

#if defined(TRAPDYN_HAVE_AVX2)
bool cpu_has_avx2() noexcept;
void row_successors_avx2(const RowPolys& row, Residue p, Residue y0, std::span<std::uint32_t> out);
void map_batch_avx2(const CompiledMap& map, std::span<const Residue> in, std::span<Residue> out,
                    std::size_t count);
void iterate_batch_avx2(const CompiledMap& map, std::span<Residue> points, std::size_t count,
                        std::uint64_t steps);
#endif

}  // namespace trapdyn::kernels::detail
