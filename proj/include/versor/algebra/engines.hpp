#pragma once

#include "versor/algebra/cayley.hpp"
#include "versor/algebra/multivector.hpp"
#include "versor/common/real.hpp"

namespace versor {

// Raw kernels over coefficient arrays (no allocation; out must be zeroed and
// distinct from the inputs). The Multivector wrappers below are the public
// entry points.

// Table-driven product: one lookup-MAD per blade pair, dim^2 total.
void gp_naive_kernel(const CayleyTable& table, const real* a, const real* b,
                     real* out);

// Table-free product: sign and metric recomputed per pair from the masks.
// Costs n logic+MAD ops per pair, n * dim^2 total, and touches no memory
// beyond the three coefficient arrays.
void gp_bitmask_kernel(const Signature& sig, const real* a, const real* b,
                       real* out);

Multivector geometric_product_naive(const Multivector& a, const Multivector& b,
                                    const CayleyTable& table);
Multivector geometric_product_bitmask(const Multivector& a,
                                      const Multivector& b);

// Default product.
inline Multivector operator*(const Multivector& a, const Multivector& b) {
  return geometric_product_bitmask(a, b);
}

// <a reverse(b)>_0 without forming the product: the scalar part only picks up
// aligned blades, so this is a signed dot product, dim MADs.
real scalar_product_fast(const Multivector& a, const Multivector& b);
real scalar_product_fast_kernel(const Signature& sig, const real* a,
                                const real* b);

// <a reverse(a)>_0. Indefinite: positive on spatial rotors, but blades whose
// square times reversal sign is -1 contribute negatively.
real scalar_norm(const Multivector& a);

}  // namespace versor
