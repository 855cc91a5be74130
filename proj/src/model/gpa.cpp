#include "versor/model/gpa.hpp"

#include <cmath>
#include <limits>

#include "versor/algebra/engines.hpp"
#include "versor/algebra/grade_pairs.hpp"
#include "versor/algebra/signature.hpp"
#include "versor/common/errors.hpp"
#include "versor/model/init.hpp"

namespace versor::nn {

GpaParams GpaParams::init(int d_in, Rng& rng) {
  GpaParams p;
  p.wq = versor_init(d_in, 32, rng);
  p.wk = versor_init(d_in, 32, rng);
  p.wv = versor_init(d_in, 32, rng);
  p.gamma = real(0.5);
  return p;
}

GpaResult gpa_forward(const Matrix& features, const GpaParams& params) {
  const Signature& sig = cl41();
  if (params.wq.rows != features.cols || params.wk.rows != features.cols ||
      params.wv.rows != features.cols)
    throw ContractError("gpa_forward: projection rows must match feature dim");
  const int L = features.rows;
  const real inv_sqrt_d = real(1) / std::sqrt(static_cast<real>(features.cols));

  const Matrix q = matmul(features, params.wq);
  const Matrix k = matmul(features, params.wk);
  const Matrix v = matmul(features, params.wv);

  static const Grade2Pairs pairs = build_grade2_pairs(cl41());

  GpaResult r;
  r.scalar_map = Matrix(L, L);
  r.bivector_map = Matrix(L, L);
  r.attention = Matrix(L, L);
  r.out = Matrix(L, 32);

  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      const real* qi = q.row(i).data();
      const real* kj = k.row(j).data();
      r.scalar_map.at(i, j) = scalar_product_fast_kernel(sig, qi, kj);
      real c[10] = {};
      for (const auto& e : pairs.entries) c[e.slot] += e.w * qi[e.p] * kj[e.q];
      real sq = 0;
      for (int m = 0; m < 10; ++m) sq += c[m] * c[m];
      r.bivector_map.at(i, j) = std::sqrt(sq);
    }

  for (int i = 0; i < L; ++i) {
    real hi = -std::numeric_limits<real>::infinity();
    for (int j = 0; j < L; ++j) {
      const real s = (r.scalar_map.at(i, j) +
                      params.gamma * r.bivector_map.at(i, j)) *
                     inv_sqrt_d;
      r.attention.at(i, j) = s;
      hi = std::max(hi, s);
    }
    real sum = 0;
    for (int j = 0; j < L; ++j) {
      const real e = std::exp(r.attention.at(i, j) - hi);
      r.attention.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < L; ++j) {
      r.attention.at(i, j) /= sum;
      const real w = r.attention.at(i, j);
      for (int m = 0; m < 32; ++m) r.out.at(i, m) += w * v.at(j, m);
    }
  }
  return r;
}

GpaGraph gpa_build_graph(ad::Tape& tape, const Matrix& features,
                         const GpaParams& params) {
  const int d_in = features.cols;
  if (params.wq.rows != d_in)
    throw ContractError("gpa_build_graph: projection rows must match feature dim");
  GpaGraph g;
  const ad::NodeId f = tape.constant(features.a, features.rows, features.cols);
  g.wq = tape.leaf(params.wq.a, d_in, 32);
  g.wk = tape.leaf(params.wk.a, d_in, 32);
  g.wv = tape.leaf(params.wv.a, d_in, 32);
  const real gamma_v = params.gamma;
  g.gamma = tape.leaf(std::span<const real>(&gamma_v, 1), 1, 1);

  const ad::NodeId q = tape.matmul(f, g.wq);
  const ad::NodeId k = tape.matmul(f, g.wk);
  const ad::NodeId v = tape.matmul(f, g.wv);
  const ad::NodeId scores =
      tape.add(tape.pair_scalar(q, k),
               tape.scale_by(tape.pair_bivmag(q, k), g.gamma));
  g.attention = tape.softmax_rows(
      tape.scale(scores, real(1) / std::sqrt(static_cast<real>(d_in))));
  g.out = tape.matmul(g.attention, v);
  return g;
}

}  // namespace versor::nn
