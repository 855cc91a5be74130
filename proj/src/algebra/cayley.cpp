#include "versor/algebra/cayley.hpp"

#include "versor/algebra/blade.hpp"

namespace versor {

CayleyTable::CayleyTable(const Signature& sig)
    : sig_(&sig), dim_(sig.dim()), target_(dim_ * dim_), weight_(dim_ * dim_) {
  for (std::uint32_t i = 0; i < dim_; ++i)
    for (std::uint32_t j = 0; j < dim_; ++j) {
      const BasisProduct p = basis_product(i, j, sig);
      target_[i * dim_ + j] = p.mask;
      weight_[i * dim_ + j] = p.weight;
    }
}

CayleyTable build_cayley_table(const Signature& sig) { return CayleyTable(sig); }

}  // namespace versor
