#include <cmath>

#include "cpc/simd.hpp"

namespace cpc::simd::detail {

double scalar_op(TapeCode code, double x, double y, double k) {
  switch (code) {
    case TapeCode::constant: return k;
    case TapeCode::variable: return x;
    case TapeCode::add: return x + y;
    case TapeCode::sub: return x - y;
    case TapeCode::mul: return x * y;
    case TapeCode::div: return x / y;
    case TapeCode::neg: return -x;
    case TapeCode::sqrt: return std::sqrt(x);
    case TapeCode::exp: return std::exp(x);
    case TapeCode::log: return std::log(x);
    case TapeCode::pow: return std::pow(x, k);
  }
  return 0.0;
}

void series_product_scalar(const ProductPlan& plan, std::size_t group_count, const double* a,
                           const double* b, double* out) {
  for (std::size_t g = 0; g < group_count; ++g) {
    const ProductGroup& grp = plan.groups[g];
    const std::size_t base = std::size_t(grp.pair_offset) * kLanes;
    for (std::uint32_t lane = 0; lane < grp.valid_lanes; ++lane) {
      double acc = 0.0;
      for (std::uint32_t p = 0; p < grp.pair_count; ++p) {
        const std::size_t e = base + std::size_t(p) * kLanes + lane;
        if (plan.mask[e] == 0) continue;
        acc = acc + a[plan.ia[e]] * b[plan.ib[e]];
      }
      out[grp.first_output + lane] = acc;
    }
  }
}

void evaluate_tape_scalar(std::span<const TapeOp> ops, const double* vars, std::size_t lanes,
                          double* regs, std::int32_t* fault) {
  for (std::size_t l = 0; l < lanes; ++l) fault[l] = -1;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const TapeOp& op = ops[i];
    double* r = regs + i * lanes;
    for (std::size_t l = 0; l < lanes; ++l) {
      double x = 0.0, y = 0.0;
      if (op.code == TapeCode::variable) {
        x = vars[std::size_t(op.a) * lanes + l];
      } else if (op.code != TapeCode::constant) {
        x = regs[std::size_t(op.a) * lanes + l];
        if (op.b >= 0) y = regs[std::size_t(op.b) * lanes + l];
      }
      r[l] = scalar_op(op.code, x, y, op.k);
      if (fault[l] < 0 && !std::isfinite(r[l])) fault[l] = std::int32_t(i);
    }
  }
}

}  // namespace cpc::simd::detail
