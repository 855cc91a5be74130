#include "versor/algebra/engines.hpp"

#include <bit>
#include <cstring>

#include "versor/algebra/op_count.hpp"

namespace versor {

OpCounters& op_counters() {
  thread_local OpCounters counters;
  return counters;
}

void gp_naive_kernel(const CayleyTable& table, const real* a, const real* b,
                     real* out) {
  const std::uint32_t dim = table.dim();
  for (std::uint32_t i = 0; i < dim; ++i) {
    const real ai = a[i];
    for (std::uint32_t j = 0; j < dim; ++j)
      out[table.target(i, j)] += table.weight(i, j) * ai * b[j];
  }
  VERSOR_COUNT(naive_mads, std::uint64_t(dim) * dim);
}

void gp_bitmask_kernel(const Signature& sig, const real* a, const real* b,
                       real* out) {
  const std::uint32_t dim = sig.dim();
  const int n = sig.n();
  for (std::uint32_t i = 0; i < dim; ++i) {
    const real ai = a[i];
    for (std::uint32_t j = 0; j < dim; ++j) {
      int swaps = 0;
      for (std::uint32_t bits = j; bits; bits &= bits - 1)
        swaps += std::popcount(i >> (std::countr_zero(bits) + 1));
      real w = (swaps & 1) ? real(-1) : real(1);
      for (std::uint32_t bits = i & j; bits; bits &= bits - 1)
        w *= static_cast<real>(sig.diag(std::countr_zero(bits)));
      out[i ^ j] += w * ai * b[j];
    }
  }
  VERSOR_COUNT(bitmask_ops, std::uint64_t(n) * dim * dim);
}

Multivector geometric_product_naive(const Multivector& a, const Multivector& b,
                                    const CayleyTable& table) {
  a.check_same_sig(b);
  if (table.sig() != a.sig())
    throw ContractError("geometric_product_naive: table signature mismatch");
  Multivector out(a.sig());
  gp_naive_kernel(table, a.data(), b.data(), out.data());
  return out;
}

Multivector geometric_product_bitmask(const Multivector& a,
                                      const Multivector& b) {
  a.check_same_sig(b);
  Multivector out(a.sig());
  gp_bitmask_kernel(a.sig(), a.data(), b.data(), out.data());
  return out;
}

real scalar_product_fast_kernel(const Signature& sig, const real* a,
                                const real* b) {
  const std::uint32_t dim = sig.dim();
  real acc = 0;
  for (std::uint32_t k = 0; k < dim; ++k)
    acc += sig.blade_norm_sign(k) * a[k] * b[k];
  VERSOR_COUNT(scalar_fast_mads, dim);
  return acc;
}

real scalar_product_fast(const Multivector& a, const Multivector& b) {
  a.check_same_sig(b);
  return scalar_product_fast_kernel(a.sig(), a.data(), b.data());
}

real scalar_norm(const Multivector& a) { return scalar_product_fast(a, a); }

}  // namespace versor
