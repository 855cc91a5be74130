#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "versor/algebra/blade.hpp"
#include "versor/algebra/signature.hpp"
#include "versor/common/errors.hpp"
#include "versor/common/real.hpp"

namespace versor {

// Dense multivector: one coefficient per basis blade, indexed by bitmask.
// Carries a pointer to its signature; mixing signatures is a contract error.
class Multivector {
 public:
  explicit Multivector(const Signature& sig)
      : sig_(&sig), c_(sig.dim(), real(0)) {}

  Multivector(const Signature& sig, std::vector<real> coeffs)
      : sig_(&sig), c_(std::move(coeffs)) {
    if (c_.size() != sig.dim())
      throw ContractError("Multivector: coefficient count != 2^n");
  }

  static Multivector scalar(const Signature& sig, real value) {
    Multivector m(sig);
    m.c_[0] = value;
    return m;
  }

  static Multivector basis_blade(const Signature& sig, std::uint32_t mask,
                                 real coeff = real(1)) {
    if (mask >= sig.dim())
      throw ContractError("Multivector: blade mask out of range");
    Multivector m(sig);
    m.c_[mask] = coeff;
    return m;
  }

  const Signature& sig() const { return *sig_; }
  std::uint32_t dim() const { return sig_->dim(); }

  real operator[](std::uint32_t mask) const { return c_[mask]; }
  real& operator[](std::uint32_t mask) { return c_[mask]; }

  std::span<const real> coeffs() const { return c_; }
  std::span<real> coeffs() { return c_; }
  real* data() { return c_.data(); }
  const real* data() const { return c_.data(); }

  Multivector& operator+=(const Multivector& o) {
    check_same_sig(o);
    for (std::uint32_t k = 0; k < dim(); ++k) c_[k] += o.c_[k];
    return *this;
  }

  Multivector& operator-=(const Multivector& o) {
    check_same_sig(o);
    for (std::uint32_t k = 0; k < dim(); ++k) c_[k] -= o.c_[k];
    return *this;
  }

  Multivector& operator*=(real s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(Multivector a, real s) { return a *= s; }
  friend Multivector operator*(real s, Multivector a) { return a *= s; }
  friend Multivector operator-(Multivector a) { return a *= real(-1); }

  bool is_finite() const {
    for (real v : c_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void check_same_sig(const Multivector& o) const {
    if (*sig_ != *o.sig_)
      throw ContractError("Multivector: mixed signatures");
  }

 private:
  const Signature* sig_;
  std::vector<real> c_;
};

// Reversion: flips each blade by (-1)^(g(g-1)/2).
inline Multivector reverse(const Multivector& a) {
  Multivector out(a.sig());
  for (std::uint32_t k = 0; k < a.dim(); ++k)
    out[k] = reversion_sign(k) * a[k];
  return out;
}

// Keep only blades of the given grade.
inline Multivector grade_project(const Multivector& a, int g) {
  if (g < 0 || g > a.sig().n())
    throw ContractError("grade_project: grade out of range");
  Multivector out(a.sig());
  for (std::uint32_t k = 0; k < a.dim(); ++k)
    if (grade(k) == g) out[k] = a[k];
  return out;
}

}  // namespace versor
