#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "versor/common/errors.hpp"
#include "versor/common/real.hpp"

namespace versor {

// Diagonal metric signature of a real Clifford algebra Cl(p, q) over n = p + q
// generators. Blades are indexed by bitmask: bit b set means generator e_{b+1}
// participates, so the algebra has dim = 2^n basis blades and grade(mask) =
// popcount(mask).
class Signature {
 public:
  Signature(std::initializer_list<int> diag) : Signature(std::vector<int>(diag)) {}

  explicit Signature(std::vector<int> diag) : diag_(std::move(diag)) {
    if (diag_.size() < 1 || diag_.size() > 8)
      throw ContractError("Signature: generator count must be in [1, 8]");
    for (int d : diag_)
      if (d != 1 && d != -1)
        throw ContractError("Signature: metric entries must be +1 or -1");
    norm_sign_.resize(dim());
    for (std::uint32_t k = 0; k < dim(); ++k) {
      // <E_k reverse(E_k)>_0: each generator contracts against its mirror
      // image, so the sign is just the product of generator squares. The
      // reversal parity cancels the reordering parity exactly.
      real s = real(1);
      for (std::uint32_t bits = k; bits; bits &= bits - 1)
        s *= static_cast<real>(diag_[std::countr_zero(bits)]);
      norm_sign_[k] = s;
    }
  }

  int n() const { return static_cast<int>(diag_.size()); }
  std::uint32_t dim() const { return 1u << diag_.size(); }
  int diag(int generator) const { return diag_[generator]; }
  std::span<const int> diag() const { return diag_; }

  // <E_k reverse(E_k)>_0, always exactly +1 or -1.
  real blade_norm_sign(std::uint32_t mask) const { return norm_sign_[mask]; }

  bool operator==(const Signature& o) const { return diag_ == o.diag_; }
  bool operator!=(const Signature& o) const { return !(*this == o); }

 private:
  std::vector<int> diag_;
  std::vector<real> norm_sign_;
};

// The conformal algebra over 3D Euclidean space: Cl(4,1) with metric
// (+1, +1, +1, +1, -1). Generators e1..e3 are spatial, e4 = e_plus, e5 =
// e_minus carry the two extra conformal directions.
const Signature& cl41();

}  // namespace versor
