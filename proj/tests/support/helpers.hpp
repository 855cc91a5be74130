#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "versor/algebra/engines.hpp"
#include "versor/algebra/multivector.hpp"
#include "versor/common/rng.hpp"

namespace testsup {

inline versor::Multivector random_mv(versor::Rng& rng, const versor::Signature& sig,
                                     double lo = -1.0, double hi = 1.0) {
  versor::Multivector m(sig);
  for (std::uint32_t k = 0; k < sig.dim(); ++k)
    m[k] = static_cast<versor::real>(rng.uniform(lo, hi));
  return m;
}

inline double max_abs_diff(const versor::Multivector& a,
                           const versor::Multivector& b) {
  double worst = 0.0;
  for (std::uint32_t k = 0; k < a.dim(); ++k)
    worst = std::max(worst, std::abs(static_cast<double>(a[k] - b[k])));
  return worst;
}

inline double max_abs(const versor::Multivector& a) {
  double worst = 0.0;
  for (std::uint32_t k = 0; k < a.dim(); ++k)
    worst = std::max(worst, std::abs(static_cast<double>(a[k])));
  return worst;
}

}  // namespace testsup
