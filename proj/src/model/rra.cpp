#include "versor/model/rra.hpp"

#include <cmath>
#include <string>

#include "versor/algebra/engines.hpp"
#include "versor/algebra/signature.hpp"
#include "versor/common/errors.hpp"
#include "versor/conformal/conformal.hpp"
#include "versor/model/init.hpp"

namespace versor::nn {

namespace {

void check_params(const Matrix& features, const RraParams& p, const char* who) {
  if (p.lift.rows != features.cols || p.lift.cols != 32 ||
      p.w_bivector.rows != 32 || p.w_bivector.cols != 10 ||
      p.readout.rows != 32)
    throw ContractError(std::string(who) + ": parameter shape mismatch");
}

}  // namespace

RraScanner::RraScanner(const RraParams& params, RraOptions opts)
    : params_(params), opts_(opts), psi_(Multivector::scalar(cl41(), real(1))) {}

// One recurrence step: psi <- cayley(B(u)) psi, optionally renormalized.
// Throws with the step index on a singular Cayley denominator or a collapsed
// state.
void RraScanner::step(std::span<const real> feature_row) {
  const RraParams& p = params_;
  const Signature& sig = cl41();
  const auto& basis = cga::bivector_basis();

  // Projection: u = x W_lift (1x32), b = u W_B (1x10).
  Multivector bmv(sig);
  real u[32];
  for (int k = 0; k < 32; ++k) {
    real acc = 0;
    for (int i = 0; i < p.lift.rows; ++i) acc += feature_row[i] * p.lift.at(i, k);
    u[k] = acc;
  }
  for (int m = 0; m < 10; ++m) {
    real acc = 0;
    for (int k = 0; k < 32; ++k) acc += u[k] * p.w_bivector.at(k, m);
    bmv[basis[m].mask] = acc;
  }

  Multivector den = bmv;
  den[0] += real(2);
  Multivector num = -bmv;
  num[0] += real(2);

  Multivector den_inv(sig);
  try {
    den_inv = cga::mv_inverse(den);
  } catch (const SingularError&) {
    throw CayleySingularError(
        "rra: Cayley denominator 2 + B singular at step " +
        std::to_string(step_) + " (bivector eigenvalue -2)");
  }

  const Multivector delta = num * den_inv;
  psi_ = delta * psi_;

  if (opts_.normalize) {
    const real n = scalar_norm(psi_);
    if (!(n > real(1e-12)))
      throw DegenerateStateError("rra: state norm collapsed at step " +
                                 std::to_string(step_));
    psi_ *= real(1) / std::sqrt(n);
  }
  ++step_;
}

std::vector<real> RraScanner::predict() const {
  std::vector<real> out(params_.readout.cols, real(0));
  for (int j = 0; j < params_.readout.cols; ++j) {
    real acc = 0;
    for (int k = 0; k < 32; ++k) acc += psi_[k] * params_.readout.at(k, j);
    out[j] = acc;
  }
  return out;
}

RraParams RraParams::init(int d_in, int d_out, Rng& rng) {
  RraParams p;
  p.lift = versor_init(d_in, 32, rng);
  p.w_bivector = versor_init(32, 10, rng);
  p.readout = versor_init(32, d_out, rng);
  return p;
}

RraResult rra_forward(const Matrix& features, const RraParams& params,
                      const RraOptions& opts) {
  check_params(features, params, "rra_forward");
  const int L = features.rows;
  const int d_out = params.readout.cols;

  RraResult r;
  r.states = Matrix(L, 32);
  r.predictions = Matrix(L, d_out);

  RraScanner scan(params, opts);
  for (int t = 0; t < L; ++t) {
    scan.step(features.row(t));
    const Multivector& psi = scan.state();
    for (int k = 0; k < 32; ++k) r.states.at(t, k) = psi[k];
    for (int j = 0; j < d_out; ++j) {
      real acc = 0;
      for (int k = 0; k < 32; ++k) acc += psi[k] * params.readout.at(k, j);
      r.predictions.at(t, j) = acc;
    }
  }
  return r;
}

std::vector<Multivector> rra_scan_rotors(std::span<const Multivector> deltas,
                                         bool normalize) {
  std::vector<Multivector> states;
  states.reserve(deltas.size());
  Multivector psi = Multivector::scalar(cl41(), real(1));
  int t = 0;
  for (const Multivector& d : deltas) {
    psi = d * psi;
    if (normalize) {
      const real n = scalar_norm(psi);
      if (!(n > real(1e-12)))
        throw DegenerateStateError("rra_scan_rotors: state norm collapsed at step " +
                                   std::to_string(t));
      psi *= real(1) / std::sqrt(n);
    }
    states.push_back(psi);
    ++t;
  }
  return states;
}

real rra_checksum_scan(const Matrix& features, const RraParams& params,
                       const RraOptions& opts) {
  check_params(features, params, "rra_checksum_scan");
  RraScanner scan(params, opts);
  real checksum = 0;
  for (int t = 0; t < features.rows; ++t) {
    scan.step(features.row(t));
    checksum += scan.state()[0];
  }
  return checksum;
}

RraGraph rra_build_graph(ad::Tape& tape, const Matrix& features,
                         const RraParams& params, const RraOptions& opts) {
  check_params(features, params, "rra_build_graph");
  const int L = features.rows;

  RraGraph g;
  const ad::NodeId f = tape.constant(features.a, L, features.cols);
  g.lift = tape.leaf(params.lift.a, params.lift.rows, 32);
  g.w_bivector = tape.leaf(params.w_bivector.a, 32, 10);
  g.readout = tape.leaf(params.readout.a, 32, params.readout.cols);

  const ad::NodeId u = tape.matmul(f, g.lift);
  const ad::NodeId b10 = tape.matmul(u, g.w_bivector);

  std::vector<real> two_v(32, 0);
  two_v[0] = real(2);
  const ad::NodeId two = tape.constant(two_v, 1, 32);
  std::vector<real> one_v(32, 0);
  one_v[0] = real(1);
  ad::NodeId psi = tape.constant(one_v, 1, 32);

  std::vector<ad::NodeId> rows;
  rows.reserve(L);
  for (int t = 0; t < L; ++t) {
    const ad::NodeId b = tape.bivector_embed(tape.slice_row(b10, t));
    const ad::NodeId delta = tape.gp(tape.sub(two, b), tape.inverse(tape.add(two, b)));
    psi = tape.gp(delta, psi);
    if (opts.normalize) psi = tape.normalize(psi);
    rows.push_back(psi);
  }
  g.states = tape.concat_rows(rows);
  g.predictions = tape.matmul(g.states, g.readout);
  return g;
}

}  // namespace versor::nn
