#pragma once

#include <cstdint>
#include <vector>

#include "versor/algebra/signature.hpp"
#include "versor/common/real.hpp"

namespace versor {

// Precomputed full product table: for blade pair (i, j), the target blade
// i XOR j and the signed metric weight. dim^2 entries, row-major in i.
class CayleyTable {
 public:
  explicit CayleyTable(const Signature& sig);

  const Signature& sig() const { return *sig_; }
  std::uint32_t dim() const { return dim_; }

  std::uint32_t target(std::uint32_t i, std::uint32_t j) const {
    return target_[i * dim_ + j];
  }
  real weight(std::uint32_t i, std::uint32_t j) const {
    return weight_[i * dim_ + j];
  }

  // Fault-injection hook for negative-control tests: flips the sign of one
  // entry so downstream consistency checks must notice.
  void corrupt_entry(std::uint32_t i, std::uint32_t j) {
    weight_[i * dim_ + j] = -weight_[i * dim_ + j];
  }

 private:
  const Signature* sig_;
  std::uint32_t dim_;
  std::vector<std::uint32_t> target_;
  std::vector<real> weight_;
};

CayleyTable build_cayley_table(const Signature& sig);

}  // namespace versor
