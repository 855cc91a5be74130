#include "versor/conformal/conformal.hpp"

#include <cmath>
#include <string>

#include "versor/algebra/blade.hpp"
#include "versor/common/errors.hpp"
#include "versor/matiso/matiso.hpp"

namespace versor::cga {

namespace {

constexpr std::uint32_t kPlus = 1u << 3;   // e4 = e_plus
constexpr std::uint32_t kMinus = 1u << 4;  // e5 = e_minus

void check_cl41(const Multivector& m, const char* who) {
  if (m.sig() != cl41())
    throw ContractError(std::string(who) + ": expected a Cl(4,1) multivector");
}

}  // namespace

std::pair<Multivector, Multivector> null_basis() {
  Multivector origin(cl41());
  origin[kPlus] = real(-0.5);
  origin[kMinus] = real(0.5);
  Multivector infinity(cl41());
  infinity[kPlus] = real(1);
  infinity[kMinus] = real(1);
  return {origin, infinity};
}

Multivector lift(std::span<const real> x) {
  if (x.size() > 3) throw ContractError("lift: at most 3 coordinates");
  real sq = 0;
  for (real v : x) sq += v * v;
  Multivector out(cl41());
  for (std::size_t i = 0; i < x.size(); ++i) out[1u << i] = x[i];
  // x^2/2 e_inf + e_o resolved onto e_plus / e_minus.
  out[kPlus] = (sq - real(1)) / real(2);
  out[kMinus] = (sq + real(1)) / real(2);
  return out;
}

real conformal_inner(const Multivector& a, const Multivector& b) {
  a.check_same_sig(b);
  // <a b>_0 only collects aligned blades: sum of a_k b_k E_k^2.
  real acc = 0;
  for (std::uint32_t k = 0; k < a.dim(); ++k)
    acc += basis_product(k, k, a.sig()).weight * a[k] * b[k];
  return acc;
}

Rotor Rotor::from_multivector(const Multivector& m, real norm_tol) {
  check_cl41(m, "Rotor");
  if (!m.is_finite()) throw ContractError("Rotor: non-finite coefficients");
  real odd = 0, even = 0;
  for (std::uint32_t k = 0; k < m.dim(); ++k)
    (grade(k) % 2 ? odd : even) += std::abs(m[k]);
  if (odd > real(1e-9) * (real(1) + even))
    throw ContractError("Rotor: odd-grade content");
  const real n = versor::scalar_norm(m);
  if (std::abs(n - real(1)) > norm_tol)
    throw ContractError("Rotor: scalar norm deviates from 1 beyond tolerance");
  return Rotor(m);
}

Multivector sandwich(const Rotor& r, const Multivector& x) {
  check_cl41(x, "sandwich");
  if (std::abs(r.scalar_norm() - real(1)) > real(1e-6))
    throw ContractError("sandwich: rotor norm deviation exceeds 1e-6");
  return r.mv() * x * reverse(r.mv());
}

Rotor translator(std::span<const real> t) {
  if (t.size() > 3) throw ContractError("translator: at most 3 coordinates");
  Multivector m(cl41());
  m[0] = real(1);
  // -t e_inf / 2 with e_inf = e_plus + e_minus; e_i e_plus and e_i e_minus
  // are already in ascending order, so no reordering signs appear.
  for (std::size_t i = 0; i < t.size(); ++i) {
    m[(1u << i) | kPlus] = -t[i] / real(2);
    m[(1u << i) | kMinus] = -t[i] / real(2);
  }
  return Rotor::from_multivector(m);
}

Multivector mv_inverse(const Multivector& a) {
  check_cl41(a, "mv_inverse");
  return matiso::rho_inverse(matiso::mat4c_inverse(matiso::rho(a)));
}

const std::array<BivectorBlade, 10>& bivector_basis() {
  static const std::array<BivectorBlade, 10> basis = {{
      {3, BivectorClass::SpatialRotation, "e12"},
      {5, BivectorClass::SpatialRotation, "e13"},
      {6, BivectorClass::SpatialRotation, "e23"},
      {9, BivectorClass::TranslationLike, "e1+"},
      {10, BivectorClass::TranslationLike, "e2+"},
      {12, BivectorClass::TranslationLike, "e3+"},
      {17, BivectorClass::TranslationLike, "e1-"},
      {18, BivectorClass::TranslationLike, "e2-"},
      {20, BivectorClass::TranslationLike, "e3-"},
      {24, BivectorClass::Dilation, "e+-"},
  }};
  return basis;
}

Bivector Bivector::from_coeffs(std::span<const real> coeffs) {
  if (coeffs.size() != 10)
    throw ContractError("Bivector: expected 10 coefficients");
  Bivector out;
  for (int k = 0; k < 10; ++k) out.b[k] = coeffs[k];
  return out;
}

Bivector Bivector::project(const Multivector& m) {
  check_cl41(m, "Bivector::project");
  Bivector out;
  const auto& basis = bivector_basis();
  for (int k = 0; k < 10; ++k) out.b[k] = m[basis[k].mask];
  return out;
}

Multivector Bivector::embed() const {
  Multivector out(cl41());
  const auto& basis = bivector_basis();
  for (int k = 0; k < 10; ++k) out[basis[k].mask] = b[k];
  return out;
}

Rotor cayley_rotor(const Bivector& b) {
  const Multivector bm = b.embed();
  const Multivector two = Multivector::scalar(cl41(), real(2));
  Multivector denom_inv(cl41());
  try {
    denom_inv = mv_inverse(two + bm);
  } catch (const SingularError&) {
    throw CayleySingularError(
        "cayley_rotor: 2 + B is singular (B has eigenvalue -2), the bivector "
        "lies outside the Cayley domain");
  }
  return Rotor::from_multivector((two - bm) * denom_inv);
}

Rotor manifold_normalize(const Multivector& psi) {
  check_cl41(psi, "manifold_normalize");
  const real n = versor::scalar_norm(psi);
  if (!(n > real(1e-12)))
    throw DegenerateStateError(
        "manifold_normalize: scalar norm <= 1e-12, state left the rotor "
        "manifold");
  return Rotor::from_multivector(psi * (real(1) / std::sqrt(n)));
}

}  // namespace versor::cga
