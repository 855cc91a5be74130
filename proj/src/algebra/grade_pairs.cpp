#include "versor/algebra/grade_pairs.hpp"

#include "versor/algebra/blade.hpp"

namespace versor {

Grade2Pairs build_grade2_pairs(const Signature& sig) {
  Grade2Pairs out;
  for (std::uint32_t k = 0; k < sig.dim(); ++k)
    if (grade(k) == 2) out.masks.push_back(k);
  for (std::uint32_t p = 0; p < sig.dim(); ++p)
    for (std::uint32_t q = 0; q < sig.dim(); ++q) {
      const BasisProduct bp = basis_product(p, q, sig);
      if (grade(bp.mask) != 2) continue;
      int slot = 0;
      while (out.masks[slot] != bp.mask) ++slot;
      out.entries.push_back({p, q, bp.weight * reversion_sign(q), slot});
    }
  return out;
}

}  // namespace versor
