#include "versor/matiso/matiso.hpp"

#include <bit>
#include <cmath>

#include "versor/algebra/op_count.hpp"
#include "versor/algebra/signature.hpp"
#include "versor/common/errors.hpp"

namespace versor::matiso {

namespace {

struct Mat2C {
  std::array<cplx, 4> m{};
};

Mat2C kron_factor(char which) {
  const cplx i(0, 1);
  switch (which) {
    case 'x': return {{cplx(0), cplx(1), cplx(1), cplx(0)}};
    case 'y': return {{cplx(0), -i, i, cplx(0)}};
    case 'z': return {{cplx(1), cplx(0), cplx(0), cplx(-1)}};
    default:  return {{cplx(1), cplx(0), cplx(0), cplx(1)}};  // identity
  }
}

Mat4C kron(const Mat2C& a, const Mat2C& b) {
  Mat4C out;
  for (int r1 = 0; r1 < 2; ++r1)
    for (int c1 = 0; c1 < 2; ++c1)
      for (int r2 = 0; r2 < 2; ++r2)
        for (int c2 = 0; c2 < 2; ++c2)
          out.at(2 * r1 + r2, 2 * c1 + c2) = a.m[2 * r1 + c1] * b.m[2 * r2 + c2];
  return out;
}

void flatten(const Mat4C& m, real* out32) {
  for (int k = 0; k < 16; ++k) {
    out32[2 * k] = m.m[k].real();
    out32[2 * k + 1] = m.m[k].imag();
  }
}

// Gauss-Jordan inverse of a 32x32 real matrix; only runs once, at IsoBasis
// construction, so plain full pivoting-free elimination with row swaps is
// plenty.
void invert32(std::array<real, 32 * 32>& a) {
  std::array<real, 32 * 32> inv{};
  for (int k = 0; k < 32; ++k) inv[k * 32 + k] = 1;
  for (int col = 0; col < 32; ++col) {
    int piv = col;
    for (int r = col + 1; r < 32; ++r)
      if (std::abs(a[r * 32 + col]) > std::abs(a[piv * 32 + col])) piv = r;
    if (a[piv * 32 + col] == real(0))
      throw SingularError("IsoBasis: blade images not independent");
    if (piv != col)
      for (int c = 0; c < 32; ++c) {
        std::swap(a[piv * 32 + c], a[col * 32 + c]);
        std::swap(inv[piv * 32 + c], inv[col * 32 + c]);
      }
    const real d = a[col * 32 + col];
    for (int c = 0; c < 32; ++c) {
      a[col * 32 + c] /= d;
      inv[col * 32 + c] /= d;
    }
    for (int r = 0; r < 32; ++r) {
      if (r == col) continue;
      const real f = a[r * 32 + col];
      if (f == real(0)) continue;
      for (int c = 0; c < 32; ++c) {
        a[r * 32 + c] -= f * a[col * 32 + c];
        inv[r * 32 + c] -= f * inv[col * 32 + c];
      }
    }
  }
  a = inv;
}

}  // namespace

Mat4C Mat4C::identity() {
  Mat4C m;
  for (int k = 0; k < 4; ++k) m.at(k, k) = cplx(1);
  return m;
}

std::array<Mat4C, 5> build_generators() {
  const Mat2C sx = kron_factor('x'), sy = kron_factor('y'), sz = kron_factor('z'),
              id = kron_factor('i');
  std::array<Mat4C, 5> g;
  g[0] = kron(sx, id);
  g[1] = kron(sy, id);
  g[2] = kron(sz, sx);
  g[3] = kron(sz, sy);
  g[4] = kron(sz, sz) * cplx(0, 1);  // squares to -I, the e_minus direction
  return g;
}

Mat4C mat4c_mul(const Mat4C& a, const Mat4C& b) {
  Mat4C out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cplx acc(0);
      for (int k = 0; k < 4; ++k) acc += a.at(r, k) * b.at(k, c);
      out.at(r, c) = acc;
    }
  VERSOR_COUNT(matiso_core_flops, 64 * 4);
  return out;
}

Mat4C mat4c_inverse(const Mat4C& a) {
  real hadamard = 1;
  for (int r = 0; r < 4; ++r) {
    real row = 0;
    for (int c = 0; c < 4; ++c) row += std::norm(a.at(r, c));
    hadamard *= std::sqrt(row);
  }

  Mat4C work = a;
  Mat4C inv = Mat4C::identity();
  real abs_det = 1;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(work.at(r, col)) > std::abs(work.at(piv, col))) piv = r;
    const cplx p = work.at(piv, col);
    abs_det *= std::abs(p);
    if (p == cplx(0))
      throw SingularError("mat4c_inverse: exactly singular matrix");
    if (piv != col)
      for (int c = 0; c < 4; ++c) {
        std::swap(work.at(piv, c), work.at(col, c));
        std::swap(inv.at(piv, c), inv.at(col, c));
      }
    for (int c = 0; c < 4; ++c) {
      work.at(col, c) /= p;
      inv.at(col, c) /= p;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const cplx f = work.at(r, col);
      if (f == cplx(0)) continue;
      for (int c = 0; c < 4; ++c) {
        work.at(r, c) -= f * work.at(col, c);
        inv.at(r, c) -= f * inv.at(col, c);
      }
    }
  }
  if (abs_det < real(1e-12) * hadamard)
    throw SingularError("mat4c_inverse: |det| below 1e-12 * Hadamard bound");
  return inv;
}

IsoBasis::IsoBasis() : gen_(build_generators()) {
  for (std::uint32_t mask = 0; mask < 32; ++mask) {
    Mat4C acc = Mat4C::identity();
    for (int b = 0; b < 5; ++b)
      if (mask & (1u << b)) acc = mat4c_mul(acc, gen_[b]);
    blade_[mask] = acc;
  }
  // Columns of the forward map are the flattened blade images; invert once.
  std::array<real, 32 * 32> fwd{};
  for (std::uint32_t j = 0; j < 32; ++j) {
    real col[32];
    flatten(blade_[j], col);
    for (int r = 0; r < 32; ++r) fwd[r * 32 + j] = col[r];
  }
  invert32(fwd);
  inv_map_ = fwd;
}

const IsoBasis& IsoBasis::instance() {
  static const IsoBasis basis;
  return basis;
}

Mat4C rho(const Multivector& a) {
  if (a.sig() != cl41())
    throw ContractError("rho: matrix isomorphism is defined for Cl(4,1) only");
  const IsoBasis& basis = IsoBasis::instance();
  Mat4C out;
  for (std::uint32_t j = 0; j < 32; ++j) {
    const real c = a[j];
    if (c == real(0)) continue;
    for (int k = 0; k < 16; ++k) out.m[k] += c * basis.blade(j).m[k];
  }
  return out;
}

Multivector rho_inverse(const Mat4C& m) {
  const IsoBasis& basis = IsoBasis::instance();
  real flat[32];
  flatten(m, flat);
  Multivector out(cl41());
  for (int r = 0; r < 32; ++r) {
    real acc = 0;
    for (int c = 0; c < 32; ++c) acc += basis.inverse_map()[r * 32 + c] * flat[c];
    out[static_cast<std::uint32_t>(r)] = acc;
  }
  return out;
}

Multivector product_via_iso(const Multivector& a, const Multivector& b) {
  return rho_inverse(mat4c_mul(rho(a), rho(b)));
}

}  // namespace versor::matiso
