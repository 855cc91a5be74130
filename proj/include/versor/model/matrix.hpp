#pragma once

#include <span>
#include <vector>

#include "versor/common/errors.hpp"
#include "versor/common/real.hpp"

namespace versor::nn {

// Minimal row-major dense matrix; just enough plumbing for the tiny models
// here, no linear-algebra library required.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<real> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, real(0)) {}

  real& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  real at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  std::span<const real> row(int r) const {
    return std::span<const real>(a).subspan(static_cast<std::size_t>(r) * cols, cols);
  }
  std::span<real> row(int r) {
    return std::span<real>(a).subspan(static_cast<std::size_t>(r) * cols, cols);
  }

  std::size_t size() const { return a.size(); }
};

inline Matrix matmul(const Matrix& x, const Matrix& w) {
  if (x.cols != w.rows) throw ContractError("matmul: inner dimension mismatch");
  Matrix out(x.rows, w.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const real f = x.at(i, k);
      if (f == real(0)) continue;
      for (int j = 0; j < w.cols; ++j) out.at(i, j) += f * w.at(k, j);
    }
  return out;
}

}  // namespace versor::nn
