// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "kernels_impl.hpp"

namespace trapdyn::kernels::detail {

namespace {

struct ModP {
  __m256d p;
  __m256d inv;

  explicit ModP(Residue modulus)
      : p(_mm256_set1_pd(static_cast<double>(modulus))),
        inv(_mm256_set1_pd(1.0 / static_cast<double>(modulus))) {}

  // Operands in [0, p) with p < 2^26, so a*b < 2^52 is exact and the
  // estimated quotient is off by at most one.
  __m256d mul(__m256d a, __m256d b) const {
    const __m256d prod = _mm256_mul_pd(a, b);
    const __m256d q = _mm256_floor_pd(_mm256_mul_pd(prod, inv));
    __m256d r = _mm256_sub_pd(prod, _mm256_mul_pd(q, p));
    r = _mm256_add_pd(r, _mm256_and_pd(_mm256_cmp_pd(r, _mm256_setzero_pd(), _CMP_LT_OQ), p));
    r = _mm256_sub_pd(r, _mm256_and_pd(_mm256_cmp_pd(r, p, _CMP_GE_OQ), p));
    return r;
  }

  __m256d add(__m256d a, __m256d b) const {
    const __m256d s = _mm256_add_pd(a, b);
    return _mm256_sub_pd(s, _mm256_and_pd(_mm256_cmp_pd(s, p, _CMP_GE_OQ), p));
  }
};

}  // namespace

void row_successors_avx2(const RowPolys& row, Residue p, Residue y0, std::span<std::uint32_t> out) {
  const ModP mod(p);
  const double radix = static_cast<double>(p);
  const std::size_t n = out.size();
  const std::size_t body = n - n % 4;
  __m256d y = _mm256_setr_pd(y0, y0 + 1.0, y0 + 2.0, y0 + 3.0);
  const __m256d four = _mm256_set1_pd(4.0);
  for (std::size_t j = 0; j < body; j += 4) {
    __m256d index = _mm256_setzero_pd();
    for (std::size_t c = 0; c < row.components; ++c) {
      const auto coeffs = row.component(c);
      __m256d acc = _mm256_set1_pd(static_cast<double>(coeffs.back()));
      for (std::size_t d = coeffs.size() - 1; d-- > 0;) {
        acc = mod.add(mod.mul(acc, y), _mm256_set1_pd(static_cast<double>(coeffs[d])));
      }
      index = _mm256_add_pd(_mm256_mul_pd(index, _mm256_set1_pd(radix)), acc);
    }
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out.data() + j), _mm256_cvttpd_epi32(index));
    y = _mm256_add_pd(y, four);
  }
  if (body < n) {
    row_successors_scalar(row, p, static_cast<Residue>(y0 + body), out.subspan(body));
  }
}

void map_batch_avx2(const CompiledMap& map, std::span<const Residue> in, std::span<Residue> out,
                    std::size_t count) {
  const ModP mod(map.p);
  const std::size_t n = map.num_vars;
  const std::size_t body = count - count % 4;

  // powers[v][e] = x_v^e for the current block of four points.
  std::vector<std::vector<__m256d>> powers(n);
  for (std::size_t v = 0; v < n; ++v) powers[v].resize(map.max_exponent[v] + 1);
  std::vector<__m256d> result(n);

  for (std::size_t j = 0; j < body; j += 4) {
    for (std::size_t v = 0; v < n; ++v) {
      const __m128i raw = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in.data() + v * count + j));
      auto& pw = powers[v];
      pw[0] = _mm256_set1_pd(1.0);
      if (pw.size() > 1) pw[1] = _mm256_cvtepi32_pd(raw);
      for (std::size_t e = 2; e < pw.size(); ++e) pw[e] = mod.mul(pw[e - 1], pw[1]);
    }
    for (std::size_t c = 0; c < n; ++c) {
      __m256d acc = _mm256_setzero_pd();
      for (const auto& t : map.components[c]) {
        __m256d term = _mm256_set1_pd(static_cast<double>(t.coefficient));
        for (std::size_t v = 0; v < n; ++v) {
          if (t.exponents[v] != 0) term = mod.mul(term, powers[v][t.exponents[v]]);
        }
        acc = mod.add(acc, term);
      }
      result[c] = acc;
    }
    for (std::size_t v = 0; v < n; ++v) {
      _mm_storeu_si128(reinterpret_cast<__m128i*>(out.data() + v * count + j), _mm256_cvttpd_epi32(result[v]));
    }
  }

  const std::size_t rest = count - body;
  if (rest != 0) {
    std::vector<Residue> tmp_in(n * rest);
    std::vector<Residue> tmp_out(n * rest);
    for (std::size_t v = 0; v < n; ++v) {
      std::copy_n(in.data() + v * count + body, rest, tmp_in.data() + v * rest);
    }
    map_batch_scalar(map, tmp_in, tmp_out, rest);
    for (std::size_t v = 0; v < n; ++v) {
      std::copy_n(tmp_out.data() + v * rest, rest, out.data() + v * count + body);
    }
  }
}

void iterate_batch_avx2(const CompiledMap& map, std::span<Residue> points, std::size_t count,
                        std::uint64_t steps) {
  // Four independent vectors per group hide the latency of the reduction chain;
  // points stay in registers for all steps.
  constexpr std::size_t kLanes = 4;
  constexpr std::size_t kGroup = 4 * kLanes;
  const ModP mod(map.p);
  const std::size_t n = map.num_vars;
  const std::size_t body = count - count % kGroup;

  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offset[v + 1] = offset[v] + map.max_exponent[v] + 1;
  std::vector<__m256d> powers(offset[n] * kLanes);
  std::vector<__m256d> x(n * kLanes);
  std::vector<__m256d> next(n * kLanes);
  std::vector<std::vector<__m256d>> coeff(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (const auto& t : map.components[c]) coeff[c].push_back(_mm256_set1_pd(static_cast<double>(t.coefficient)));
  }

  for (std::size_t j = 0; j < body; j += kGroup) {
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t u = 0; u < kLanes; ++u) {
        const __m128i raw = _mm_loadu_si128(reinterpret_cast<const __m128i*>(points.data() + v * count + j + 4 * u));
        x[v * kLanes + u] = _mm256_cvtepi32_pd(raw);
      }
    }
    for (std::uint64_t s = 0; s < steps; ++s) {
      for (std::size_t v = 0; v < n; ++v) {
        __m256d* pw = powers.data() + offset[v] * kLanes;
        for (std::size_t u = 0; u < kLanes; ++u) pw[u] = _mm256_set1_pd(1.0);
        if (map.max_exponent[v] >= 1) {
          for (std::size_t u = 0; u < kLanes; ++u) pw[kLanes + u] = x[v * kLanes + u];
        }
        for (std::size_t e = 2; e <= map.max_exponent[v]; ++e) {
          for (std::size_t u = 0; u < kLanes; ++u) pw[e * kLanes + u] = mod.mul(pw[(e - 1) * kLanes + u], pw[kLanes + u]);
        }
      }
      for (std::size_t c = 0; c < n; ++c) {
        __m256d acc[kLanes];
        for (std::size_t u = 0; u < kLanes; ++u) acc[u] = _mm256_setzero_pd();
        const auto& terms = map.components[c];
        for (std::size_t t = 0; t < terms.size(); ++t) {
          __m256d term[kLanes];
          for (std::size_t u = 0; u < kLanes; ++u) term[u] = coeff[c][t];
          for (std::size_t v = 0; v < n; ++v) {
            const std::uint32_t e = terms[t].exponents[v];
            if (e == 0) continue;
            const __m256d* pw = powers.data() + (offset[v] + e) * kLanes;
            for (std::size_t u = 0; u < kLanes; ++u) term[u] = mod.mul(term[u], pw[u]);
          }
          for (std::size_t u = 0; u < kLanes; ++u) acc[u] = mod.add(acc[u], term[u]);
        }
        for (std::size_t u = 0; u < kLanes; ++u) next[c * kLanes + u] = acc[u];
      }
      std::swap(x, next);
    }
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t u = 0; u < kLanes; ++u) {
        _mm_storeu_si128(reinterpret_cast<__m128i*>(points.data() + v * count + j + 4 * u),
                         _mm256_cvttpd_epi32(x[v * kLanes + u]));
      }
    }
  }

  const std::size_t rest = count - body;
  if (rest != 0) {
    std::vector<Residue> tmp(n * rest);
    for (std::size_t v = 0; v < n; ++v) std::copy_n(points.data() + v * count + body, rest, tmp.data() + v * rest);
    for (std::uint64_t s = 0; s < steps; ++s) map_batch_scalar(map, tmp, tmp, rest);
    for (std::size_t v = 0; v < n; ++v) std::copy_n(tmp.data() + v * rest, rest, points.data() + v * count + body);
  }
}

}  // namespace trapdyn::kernels::detail
