#pragma once

#include <bit>
#include <cstdint>

#include "versor/algebra/signature.hpp"
#include "versor/common/real.hpp"

namespace versor {

inline int grade(std::uint32_t mask) { return std::popcount(mask); }

// Sign picked up when reversing a blade of grade g: (-1)^(g(g-1)/2).
inline real reversion_sign(std::uint32_t mask) {
  const int g = std::popcount(mask);
  return ((g * (g - 1) / 2) % 2) ? real(-1) : real(1);
}

struct BasisProduct {
  std::uint32_t mask;
  real weight;
};

// Product of two basis blades from bit arithmetic alone.
//
// The result blade is i XOR j (generators shared by both operands square out
// and leave the symmetric difference). The sign has two factors:
//   - reordering parity: each generator bit b of j must commute past every
//     higher generator of i, contributing popcount(i >> (b+1)) transpositions;
//   - metric: each generator in i AND j squares to its diagonal entry.
inline BasisProduct basis_product(std::uint32_t i, std::uint32_t j,
                                  const Signature& sig) {
  int swaps = 0;
  for (std::uint32_t bits = j; bits; bits &= bits - 1)
    swaps += std::popcount(i >> (std::countr_zero(bits) + 1));
  real w = (swaps & 1) ? real(-1) : real(1);
  for (std::uint32_t bits = i & j; bits; bits &= bits - 1)
    w *= static_cast<real>(sig.diag(std::countr_zero(bits)));
  return {i ^ j, w};
}

}  // namespace versor
