// Compiled with -mavx2 only (no FMA) so results match the scalar path exactly.

#include <immintrin.h>

#include <cmath>

#include "cpc/simd.hpp"

namespace cpc::simd::detail {

void series_product_avx2(const ProductPlan& plan, std::size_t group_count, const double* a,
                         const double* b, double* out) {
  for (std::size_t g = 0; g < group_count; ++g) {
    const ProductGroup& grp = plan.groups[g];
    const std::size_t base = std::size_t(grp.pair_offset) * kLanes;
    __m256d acc = _mm256_setzero_pd();
    for (std::uint32_t p = 0; p < grp.pair_count; ++p) {
      const std::size_t e = base + std::size_t(p) * kLanes;
      const __m128i ia = _mm_loadu_si128(reinterpret_cast<const __m128i*>(plan.ia.data() + e));
      const __m128i ib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(plan.ib.data() + e));
      const __m256d va = _mm256_i32gather_pd(a, ia, 8);
      const __m256d vb = _mm256_i32gather_pd(b, ib, 8);
      const __m256d m =
          _mm256_castsi256_pd(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(plan.mask.data() + e)));
      acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_mul_pd(va, vb), m));
    }
    if (grp.valid_lanes == kLanes) {
      _mm256_storeu_pd(out + grp.first_output, acc);
    } else {
      alignas(32) double tmp[kLanes];
      _mm256_store_pd(tmp, acc);
      for (std::uint32_t l = 0; l < grp.valid_lanes; ++l) out[grp.first_output + l] = tmp[l];
    }
  }
}

namespace {

inline int nonfinite_mask(__m256d v) {
  const __m256d d = _mm256_sub_pd(v, v);
  return (~_mm256_movemask_pd(_mm256_cmp_pd(d, _mm256_setzero_pd(), _CMP_EQ_OQ))) & 0xF;
}

}  // namespace

void evaluate_tape_avx2(std::span<const TapeOp> ops, const double* vars, std::size_t lanes,
                        double* regs, std::int32_t* fault) {
  for (std::size_t l = 0; l < lanes; ++l) fault[l] = -1;
  const std::size_t full = lanes - lanes % kLanes;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const TapeOp& op = ops[i];
    double* r = regs + i * lanes;
    const double* xa = op.code == TapeCode::variable ? vars + std::size_t(op.a) * lanes
                       : op.a >= 0                   ? regs + std::size_t(op.a) * lanes
                                                     : nullptr;
    const double* xb = op.b >= 0 ? regs + std::size_t(op.b) * lanes : nullptr;
    for (std::size_t l = 0; l < full; l += kLanes) {
      __m256d v;
      switch (op.code) {
        case TapeCode::constant: v = _mm256_set1_pd(op.k); break;
        case TapeCode::variable: v = _mm256_loadu_pd(xa + l); break;
        case TapeCode::add: v = _mm256_add_pd(_mm256_loadu_pd(xa + l), _mm256_loadu_pd(xb + l)); break;
        case TapeCode::sub: v = _mm256_sub_pd(_mm256_loadu_pd(xa + l), _mm256_loadu_pd(xb + l)); break;
        case TapeCode::mul: v = _mm256_mul_pd(_mm256_loadu_pd(xa + l), _mm256_loadu_pd(xb + l)); break;
        case TapeCode::div: v = _mm256_div_pd(_mm256_loadu_pd(xa + l), _mm256_loadu_pd(xb + l)); break;
        case TapeCode::neg: v = _mm256_xor_pd(_mm256_loadu_pd(xa + l), _mm256_set1_pd(-0.0)); break;
        case TapeCode::sqrt: v = _mm256_sqrt_pd(_mm256_loadu_pd(xa + l)); break;
        default: {
          // Transcendentals go lane by lane through libm, as in the scalar path.
          alignas(32) double tmp[kLanes];
          for (std::size_t j = 0; j < kLanes; ++j) tmp[j] = scalar_op(op.code, xa[l + j], 0.0, op.k);
          v = _mm256_load_pd(tmp);
        }
      }
      _mm256_storeu_pd(r + l, v);
      if (int bad = nonfinite_mask(v)) {
        for (std::size_t j = 0; j < kLanes; ++j)
          if ((bad >> j & 1) && fault[l + j] < 0) fault[l + j] = std::int32_t(i);
      }
    }
    for (std::size_t l = full; l < lanes; ++l) {
      const double x = xa ? xa[l] : 0.0;
      const double y = xb ? xb[l] : 0.0;
      r[l] = scalar_op(op.code, x, y, op.k);
      if (fault[l] < 0 && !std::isfinite(r[l])) fault[l] = std::int32_t(i);
    }
  }
}

}  // namespace cpc::simd::detail
