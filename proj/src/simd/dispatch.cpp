#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cpc/simd.hpp"

namespace cpc::simd {

namespace {

Isa initial_isa() {
  const Isa hw = detected_isa();
  if (const char* env = std::getenv("CPC_SIMD")) {
    if (std::string(env) == "scalar") return Isa::scalar;
  }
  return hw;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa detected_isa() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2)
    throw std::invalid_argument("AVX2 is not supported on this CPU");
  active().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void series_product(const ProductPlan& plan, std::size_t group_count, const double* a,
                    const double* b, double* out) {
  if (active_isa() == Isa::avx2)
    detail::series_product_avx2(plan, group_count, a, b, out);
  else
    detail::series_product_scalar(plan, group_count, a, b, out);
}

void evaluate_tape(std::span<const TapeOp> ops, const double* vars, std::size_t lanes, double* regs,
                   std::int32_t* fault) {
  if (active_isa() == Isa::avx2)
    detail::evaluate_tape_avx2(ops, vars, lanes, regs, fault);
  else
    detail::evaluate_tape_scalar(ops, vars, lanes, regs, fault);
}

}  // namespace cpc::simd
