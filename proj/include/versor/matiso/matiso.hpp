#pragma once

#include <array>
#include <complex>
#include <cstdint>

#include "versor/algebra/multivector.hpp"
#include "versor/common/real.hpp"

namespace versor::matiso {

using cplx = std::complex<real>;

// Dense 4x4 complex matrix, row-major. Cl(4,1) is isomorphic to Mat(4, C), so
// one of these carries a full multivector.
struct Mat4C {
  std::array<cplx, 16> m{};

  cplx& at(int r, int c) { return m[4 * r + c]; }
  const cplx& at(int r, int c) const { return m[4 * r + c]; }

  static Mat4C identity();

  Mat4C& operator+=(const Mat4C& o) {
    for (int k = 0; k < 16; ++k) m[k] += o.m[k];
    return *this;
  }
  Mat4C& operator-=(const Mat4C& o) {
    for (int k = 0; k < 16; ++k) m[k] -= o.m[k];
    return *this;
  }
  Mat4C& operator*=(cplx s) {
    for (auto& v : m) v *= s;
    return *this;
  }
  friend Mat4C operator+(Mat4C a, const Mat4C& b) { return a += b; }
  friend Mat4C operator-(Mat4C a, const Mat4C& b) { return a -= b; }
  friend Mat4C operator*(Mat4C a, cplx s) { return a *= s; }
};

// Schoolbook 4x4 complex multiply: 64 complex MADs, 256 real FLOPs. This is
// the whole arithmetic core of the isomorphism engine.
Mat4C mat4c_mul(const Mat4C& a, const Mat4C& b);

// Inverse by Gaussian elimination with partial pivoting. Throws SingularError
// when |det| falls below 1e-12 times the Hadamard bound (product of row
// norms) of the input.
Mat4C mat4c_inverse(const Mat4C& a);

// Images of the five generators and of all 32 basis blades (ascending-index
// generator products), plus the precomputed linear inverse of the blade map.
class IsoBasis {
 public:
  static const IsoBasis& instance();

  const std::array<Mat4C, 5>& generators() const { return gen_; }
  const Mat4C& blade(std::uint32_t mask) const { return blade_[mask]; }

  // Row-major 32x32: multivector coefficients from a flattened matrix
  // (real, imag interleaved per entry).
  const std::array<real, 32 * 32>& inverse_map() const { return inv_map_; }

 private:
  IsoBasis();
  std::array<Mat4C, 5> gen_;
  std::array<Mat4C, 32> blade_;
  std::array<real, 32 * 32> inv_map_;
};

std::array<Mat4C, 5> build_generators();

// Algebra homomorphism into Mat(4, C): rho(a) = sum_J a_J rho(E_J).
Mat4C rho(const Multivector& a);

// Linear inverse of rho; exact on the image by construction.
Multivector rho_inverse(const Mat4C& m);

// Geometric product routed through the isomorphism:
// rho_inverse(rho(a) * rho(b)).
Multivector product_via_iso(const Multivector& a, const Multivector& b);

}  // namespace versor::matiso
