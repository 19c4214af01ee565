#pragma once

// Data-parallel kernels with a scalar reference path and an AVX2 path.
// The active path is chosen once at startup from CPUID and can be forced to
// scalar with CPC_SIMD=scalar or set_active_isa().

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cpc::simd {

enum class Isa { scalar, avx2 };

Isa detected_isa();
Isa active_isa();
// Throws std::invalid_argument if the CPU cannot run `isa`.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);

inline constexpr std::size_t kLanes = 4;

// Truncated series product. Output k is sum_p a[ia[p]] * b[ib[p]] over its
// pair list. Outputs are processed in groups of kLanes; pair lists inside a
// group are padded to equal length with masked-out entries.
struct ProductGroup {
  std::uint32_t first_output;
  std::uint32_t valid_lanes;
  std::uint32_t pair_offset;  // in pairs; entry for lane l is at pair_offset*4 + p*4 + l
  std::uint32_t pair_count;
};

struct ProductPlan {
  std::vector<ProductGroup> groups;
  std::vector<std::int32_t> ia, ib;
  std::vector<std::uint64_t> mask;  // ~0 for real entries, 0 for padding
};

// Evaluates groups [0, group_count) and writes only valid lanes of `out`.
void series_product(const ProductPlan& plan, std::size_t group_count, const double* a,
                    const double* b, double* out);

enum class TapeCode : std::uint8_t { constant, variable, add, sub, mul, div, neg, sqrt, exp, log, pow };

struct TapeOp {
  TapeCode code;
  std::int32_t a = -1;  // operand register, or variable index for `variable`
  std::int32_t b = -1;
  double k = 0.0;       // constant value or real exponent
};

// Evaluates `ops` over `lanes` points. vars is [var * lanes + lane], regs is
// [op * lanes + lane]. fault[lane] receives the index of the first op whose
// result is not finite, or -1.
void evaluate_tape(std::span<const TapeOp> ops, const double* vars, std::size_t lanes, double* regs,
                   std::int32_t* fault);

namespace detail {
void series_product_scalar(const ProductPlan&, std::size_t, const double*, const double*, double*);
void series_product_avx2(const ProductPlan&, std::size_t, const double*, const double*, double*);
void evaluate_tape_scalar(std::span<const TapeOp>, const double*, std::size_t, double*, std::int32_t*);
void evaluate_tape_avx2(std::span<const TapeOp>, const double*, std::size_t, double*, std::int32_t*);
double scalar_op(TapeCode code, double x, double y, double k);
}  // namespace detail

}  // namespace cpc::simd
