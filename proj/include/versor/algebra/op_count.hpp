#pragma once

#include <cstdint>

namespace versor {

// Thread-local operation counters for the product kernels. They never affect
// numerical results; with VERSOR_ENABLE_COUNTERS=0 the increments compile out.
struct OpCounters {
  // Bitmask engine: sign/metric logic plus one MAD, counted as n ops per
  // blade pair (n = generator count), so a full product costs n * dim^2.
  std::uint64_t bitmask_ops = 0;
  // Naive engine: one table-driven MAD per blade pair.
  std::uint64_t naive_mads = 0;
  // Diagonal scalar-product path: one MAD per blade.
  std::uint64_t scalar_fast_mads = 0;
  // Matrix-isomorphism core: real FLOPs inside the 4x4 complex multiply
  // (4 per complex MAD).
  std::uint64_t matiso_core_flops = 0;

  void reset() { *this = OpCounters{}; }
};

OpCounters& op_counters();

#if defined(VERSOR_ENABLE_COUNTERS) && VERSOR_ENABLE_COUNTERS
#define VERSOR_COUNT(field, amount) (::versor::op_counters().field += (amount))
#else
#define VERSOR_COUNT(field, amount) ((void)0)
#endif

}  // namespace versor
