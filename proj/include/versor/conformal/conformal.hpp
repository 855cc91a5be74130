#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

#include "versor/algebra/engines.hpp"
#include "versor/algebra/multivector.hpp"
#include "versor/common/real.hpp"

namespace versor::cga {

// Null basis of the conformal model: origin e_o = (e_minus - e_plus)/2 and
// infinity e_inf = e_minus + e_plus. Both square to zero and e_o . e_inf = -1.
std::pair<Multivector, Multivector> null_basis();

// Conformal embedding of a Euclidean point (up to 3 coordinates):
// X = x + x^2/2 e_inf + e_o. Null by construction.
Multivector lift(std::span<const real> x);

// Scalar part of the geometric product, <a b>_0. On lifted points this equals
// -dist^2 / 2.
real conformal_inner(const Multivector& a, const Multivector& b);

// Even-grade multivector with unit scalar norm; validated on construction so
// downstream sandwiches can rely on it.
class Rotor {
 public:
  static Rotor from_multivector(const Multivector& m, real norm_tol = real(1e-6));

  const Multivector& mv() const { return mv_; }
  real scalar_norm() const { return versor::scalar_norm(mv_); }

 private:
  explicit Rotor(Multivector m) : mv_(std::move(m)) {}
  Multivector mv_;
};

// R X reverse(R). Checks the rotor is still unit to 1e-6 before applying.
Multivector sandwich(const Rotor& r, const Multivector& x);

// Translation rotor T = 1 - t e_inf / 2; sandwiching moves lifted points by t.
Rotor translator(std::span<const real> t);

// General multivector inverse through the Mat(4,C) isomorphism.
Multivector mv_inverse(const Multivector& a);

// Generator classes of the ten grade-2 basis blades.
enum class BivectorClass { SpatialRotation, TranslationLike, Dilation };

struct BivectorBlade {
  std::uint32_t mask;
  BivectorClass cls;
  std::string_view name;
};

// The ten bivector blades of Cl(4,1) in ascending mask order. The first three
// close under commutation into so(3); blades mixing a spatial generator with
// e_plus or e_minus are translation-like null directions; e_plus e_minus
// generates dilations.
const std::array<BivectorBlade, 10>& bivector_basis();

// Coefficients over bivector_basis(), the parameter space of the Cayley map.
struct Bivector {
  std::array<real, 10> b{};

  static Bivector from_coeffs(std::span<const real> coeffs);
  // Grade-2 extraction of an arbitrary multivector.
  static Bivector project(const Multivector& m);

  Multivector embed() const;
};

// Cayley transform of a bivector: R = (2 - B)(2 + B)^-1. Maps the flat
// bivector space onto rotors, with R reverse(R) = 1 identically; fails only
// when B has an eigenvalue at -2, making 2 + B singular.
Rotor cayley_rotor(const Bivector& b);

// Scale an even multivector back to unit scalar norm. Degenerate (including
// negative-norm) states are rejected rather than silently rescaled.
Rotor manifold_normalize(const Multivector& psi);

}  // namespace versor::cga
